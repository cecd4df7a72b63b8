#include "rideshare/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace rideshare {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
bool parse_number(const std::string& s, T& out) {
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

template <typename T>
T field(const std::vector<std::string>& row, std::size_t k, const char* name, std::size_t line) {
  T v{};
  if (!parse_number(row[k], v)) throw ParseError(std::string("bad ") + name + " '" + row[k] + "'", line);
  return v;
}

std::string fmt(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

void expect_header(std::istream& in, const std::string& want, std::size_t& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line) != want) throw ParseError("expected header '" + want + "'", line_no);
}

}  // namespace

std::vector<RiderRequest> read_requests_csv(std::istream& in) {
  std::size_t line_no = 0;
  expect_header(in, "id,t_s,src,dst,rn,w_s,theta", line_no);
  std::vector<RiderRequest> out;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto row = split(line);
    if (row.size() != 7) throw ParseError("expected 7 fields, got " + std::to_string(row.size()), line_no);
    RiderRequest r;
    r.id = field<RiderId>(row, 0, "id", line_no);
    r.t = field<double>(row, 1, "t_s", line_no);
    r.source = field<VertexId>(row, 2, "src", line_no);
    r.destination = field<VertexId>(row, 3, "dst", line_no);
    r.riders = field<int>(row, 4, "rn", line_no);
    r.wait_s = field<double>(row, 5, "w_s", line_no);
    r.theta = field<double>(row, 6, "theta", line_no);
    try {
      validate_request(r);
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line_no);
    }
    out.push_back(r);
  }
  return out;
}

void write_requests_csv(std::ostream& out, const std::vector<RiderRequest>& requests) {
  out << "id,t_s,src,dst,rn,w_s,theta\n";
  for (const auto& r : requests) {
    out << r.id << ',' << fmt(r.t) << ',' << r.source << ',' << r.destination << ',' << r.riders << ','
        << fmt(r.wait_s) << ',' << fmt(r.theta) << '\n';
  }
}

std::vector<RiderRequest> read_shanghai_csv(std::istream& in, double wait_s, double theta) {
  std::vector<RiderRequest> out;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto row = split(line);
    if (row.size() != 3) throw ParseError("expected timestamp,pickup_vertex,dropoff_vertex", line_no);
    double t = 0.0;
    if (first && !parse_number(row[0], t)) {
      first = false;
      continue;  // header
    }
    first = false;
    RiderRequest r;
    r.id = static_cast<RiderId>(out.size() + 1);
    r.t = field<double>(row, 0, "timestamp", line_no);
    r.source = field<VertexId>(row, 1, "pickup_vertex", line_no);
    r.destination = field<VertexId>(row, 2, "dropoff_vertex", line_no);
    r.wait_s = wait_s;
    r.theta = theta;
    if (r.source == r.destination) continue;  // nothing to match
    out.push_back(r);
  }
  std::stable_sort(out.begin(), out.end(), [](const RiderRequest& a, const RiderRequest& b) { return a.t < b.t; });
  return out;
}

Fleet read_drivers_csv(std::istream& in) {
  std::size_t line_no = 0;
  expect_header(in, "id,vertex,capacity", line_no);
  Fleet fleet;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto row = split(line);
    if (row.size() != 3) throw ParseError("expected 3 fields, got " + std::to_string(row.size()), line_no);
    Driver d;
    d.id = field<DriverId>(row, 0, "id", line_no);
    const auto v = field<VertexId>(row, 1, "vertex", line_no);
    const int cap = field<int>(row, 2, "capacity", line_no);
    if (cap < 0) throw ParseError("negative capacity", line_no);
    d.trip = TripSchedule(v, cap);
    fleet.push_back(std::move(d));
  }
  std::sort(fleet.begin(), fleet.end(), [](const Driver& a, const Driver& b) { return a.id < b.id; });
  for (std::size_t k = 1; k < fleet.size(); ++k) {
    if (fleet[k].id == fleet[k - 1].id) throw ValidationError("duplicate driver id " + std::to_string(fleet[k].id));
  }
  return fleet;
}

void write_drivers_csv(std::ostream& out, const Fleet& fleet) {
  out << "id,vertex,capacity\n";
  for (const auto& d : fleet) out << d.id << ',' << d.location() << ',' << d.trip.capacity() << '\n';
}

void check_against_network(const RoadNetwork& net, const std::vector<RiderRequest>& requests, const Fleet& fleet) {
  for (const auto& r : requests) {
    if (!net.valid_vertex(r.source) || !net.valid_vertex(r.destination)) {
      throw ValidationError("request " + std::to_string(r.id) + " uses a vertex outside the network");
    }
  }
  for (const auto& d : fleet) {
    if (!net.valid_vertex(d.location())) {
      throw ValidationError("driver " + std::to_string(d.id) + " starts outside the network");
    }
  }
}

namespace {

template <typename T>
void set_from(const std::string& key, const std::string& value, T& out) {
  if constexpr (std::is_same_v<T, std::string>) {
    out = value;
  } else if (!parse_number(value, out)) {
    throw ValidationError("bad value '" + value + "' for " + key);
  }
}

// Visits every setting as (key, member).
template <typename Config, typename F>
void for_each_setting(Config& c, F&& f) {
  f("w_min", c.w_min);
  f("theta", c.theta);
  f("capacity", c.capacity);
  f("drivers", c.drivers);
  f("dt_s", c.dt_s);
  f("partitions", c.partitions);
  f("speed_kmh", c.speed_kmh);
  f("algo", c.algo);
  f("gamma", c.gamma);
  f("seed", c.seed);
  f("relax", c.relax);
  f("relax_w_max", c.relax_w_max);
  f("relax_theta_max", c.relax_theta_max);
  f("relax_steps", c.relax_steps);
  f("sa_perturbations", c.sa_perturbations);
  f("sa_t0", c.sa_t0);
  f("sa_decay", c.sa_decay);
  f("sa_t_min", c.sa_t_min);
}

}  // namespace

void RunConfig::apply(const std::map<std::string, std::string>& settings) {
  for (const auto& [key, value] : settings) {
    bool known = false;
    for_each_setting(*this, [&](const char* name, auto& member) {
      if (key != name) return;
      known = true;
      set_from(key, value, member);
    });
    if (!known) throw ValidationError("unknown setting '" + key + "'");
  }
}

std::string RunConfig::echo() const {
  std::ostringstream out;
  bool first = true;
  for_each_setting(*this, [&](const char* name, const auto& member) {
    if (!first) out << ' ';
    first = false;
    out << name << '=';
    if constexpr (std::is_floating_point_v<std::decay_t<decltype(member)>>) {
      out << fmt(member);
    } else {
      out << member;
    }
  });
  return out.str();
}

void RunConfig::validate() const {
  if (!(w_min >= 0.0)) throw ValidationError("w_min must be >= 0");
  if (!(theta >= 0.0)) throw ValidationError("theta must be >= 0");
  if (capacity < 1) throw ValidationError("capacity must be >= 1");
  if (drivers < 1) throw ValidationError("drivers must be >= 1");
  if (partitions < 1) throw ValidationError("partitions must be >= 1");
  if (gamma < 1) throw ValidationError("gamma must be >= 1");
  if (!(sa_decay > 0.0 && sa_decay < 1.0)) throw ValidationError("sa_decay must lie in (0, 1)");
  parse_algorithm(algo);
  parse_relax_mode(relax);
  sim_config().validate();
}

SimConfig RunConfig::sim_config() const {
  SimConfig s;
  s.dt_s = dt_s;
  s.speed_kmh = speed_kmh;
  s.matcher.algorithm = parse_algorithm(algo);
  s.matcher.gamma = gamma;
  s.matcher.annealing.perturbations = sa_perturbations;
  s.matcher.annealing.t0 = sa_t0;
  s.matcher.annealing.decay = sa_decay;
  s.matcher.annealing.t_min = sa_t_min;
  s.relax = parse_relax_mode(relax);
  s.relax_policy = {relax_w_max, relax_theta_max, relax_steps};
  s.seed = seed;
  return s;
}

std::map<std::string, std::string> parse_config(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ParseError("empty key or value", line_no);
    if (out.count(key)) throw ParseError("duplicate key '" + key + "'", line_no);
    out[key] = value;
  }
  return out;
}

RunConfig resolve_config(const std::map<std::string, std::string>& file,
                         const std::map<std::string, std::string>& flags) {
  RunConfig c;
  c.apply(file);
  c.apply(flags);
  c.validate();
  return c;
}

void GeneratorSpec::validate() const {
  if (side < 2) throw ValidationError("grid side must be >= 2");
  if (edge_min < 1 || edge_max < edge_min) throw ValidationError("edge length range must be 1 <= min <= max");
  if (requests < 0 || drivers < 0) throw ValidationError("counts must be >= 0");
  if (!(rate > 0.0)) throw ValidationError("arrival rate must be positive");
  if (hotspots < 0 || !(hotspot_share >= 0.0 && hotspot_share <= 1.0)) throw ValidationError("bad hotspot mix");
  if (hotspots == 0 && hotspot_share > 0.0) throw ValidationError("hotspot share needs at least one hotspot");
  if (rn_max < 1) throw ValidationError("rn_max must be >= 1");
  if (!(w_min_s >= 0.0 && w_max_s >= w_min_s)) throw ValidationError("bad waiting range");
  if (!(theta_min >= 0.0 && theta_max >= theta_min)) throw ValidationError("bad detour range");
  if (capacity < 1) throw ValidationError("capacity must be >= 1");
}

RoadNetwork generate_network(const GeneratorSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<Meters> len(spec.edge_min, spec.edge_max);
  const int n = spec.side;
  auto id = [n](int r, int c) { return static_cast<VertexId>(r * n + c); };
  std::vector<Edge> edges;
  std::vector<Coord> coords;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      coords.push_back({31.0 + r * 0.001, 121.0 + c * 0.001});
      if (c + 1 < n) edges.push_back({id(r, c), id(r, c + 1), len(rng)});
      if (r + 1 < n) edges.push_back({id(r, c), id(r + 1, c), len(rng)});
    }
  }
  if (spec.kind == GeneratorSpec::Kind::kPlanar) {
    for (int r = 0; r + 1 < n; ++r) {
      for (int c = 0; c + 1 < n; ++c) {
        if (rng() % 2 == 0) continue;
        // Diagonals are longer than either side they cut across.
        const Meters l = spec.edge_max + len(rng) / 2;
        if (rng() % 2 == 0) {
          edges.push_back({id(r, c), id(r + 1, c + 1), l});
        } else {
          edges.push_back({id(r, c + 1), id(r + 1, c), l});
        }
      }
    }
  }
  return RoadNetwork(static_cast<VertexId>(n * n), std::move(edges), std::move(coords));
}

std::vector<RiderRequest> generate_requests(const GeneratorSpec& spec, const RoadNetwork& net) {
  spec.validate();
  std::mt19937_64 rng(spec.seed ^ 0x5bd1e995ULL);
  const int n = spec.side;
  if (net.vertex_count() != n * n) throw ValidationError("network does not match the generator grid");
  std::uniform_int_distribution<int> coord(0, n - 1);
  std::vector<std::pair<int, int>> centers;
  for (int h = 0; h < spec.hotspots; ++h) centers.emplace_back(coord(rng), coord(rng));
  std::normal_distribution<double> spread(0.0, std::max(1.0, n / 20.0));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> gap(spec.rate);
  std::uniform_real_distribution<double> wait(spec.w_min_s, spec.w_max_s);
  std::uniform_real_distribution<double> theta(spec.theta_min, spec.theta_max);

  auto clamp = [n](double x) { return std::clamp(static_cast<int>(std::lround(x)), 0, n - 1); };
  auto uniform_vertex = [&]() { return static_cast<VertexId>(coord(rng) * n + coord(rng)); };
  std::vector<RiderRequest> out;
  double t = 0.0;
  for (int k = 0; k < spec.requests; ++k) {
    t += gap(rng);
    RiderRequest r;
    r.id = k + 1;
    // Millisecond resolution keeps the CSV round trip exact.
    r.t = std::round(t * 1000.0) / 1000.0;
    if (!centers.empty() && unit(rng) < spec.hotspot_share) {
      const auto& [cr, cc] = centers[rng() % centers.size()];
      r.source = static_cast<VertexId>(clamp(cr + spread(rng)) * n + clamp(cc + spread(rng)));
    } else {
      r.source = uniform_vertex();
    }
    do {
      r.destination = uniform_vertex();
    } while (r.destination == r.source);
    r.riders = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(spec.rn_max));
    r.wait_s = std::round(wait(rng) * 1000.0) / 1000.0;
    r.theta = std::round(theta(rng) * 1000.0) / 1000.0;
    out.push_back(r);
  }
  return out;
}

Fleet generate_drivers(const GeneratorSpec& spec, const RoadNetwork& net) {
  spec.validate();
  std::mt19937_64 rng(spec.seed ^ 0x27d4eb2fULL);
  std::uniform_int_distribution<VertexId> pick(0, net.vertex_count() - 1);
  Fleet fleet;
  for (int k = 0; k < spec.drivers; ++k) {
    fleet.push_back({static_cast<DriverId>(k + 1), TripSchedule(pick(rng), spec.capacity), 0});
  }
  return fleet;
}

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

std::vector<RiderRequest> load_requests(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_requests_csv(in);
}

Fleet load_drivers(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_drivers_csv(in);
}

void save_requests(const std::filesystem::path& path, const std::vector<RiderRequest>& requests) {
  auto out = open_out(path);
  write_requests_csv(out, requests);
}

void save_drivers(const std::filesystem::path& path, const Fleet& fleet) {
  auto out = open_out(path);
  write_drivers_csv(out, fleet);
}

}  // namespace rideshare
