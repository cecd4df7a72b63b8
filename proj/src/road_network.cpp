#include "rideshare/road_network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <cctype>

namespace rideshare {

RoadNetwork::RoadNetwork(VertexId vertex_count, std::vector<Edge> edges, std::vector<Coord> coords)
    : vertex_count_(vertex_count), coords_(std::move(coords)) {
  if (vertex_count < 0) throw ValidationError("negative vertex count");
  if (!coords_.empty() && coords_.size() != static_cast<std::size_t>(vertex_count)) {
    throw ValidationError("coordinate table has " + std::to_string(coords_.size()) +
                          " entries for " + std::to_string(vertex_count) + " vertices");
  }
  for (auto& e : edges) {
    if (!valid_vertex(e.u) || !valid_vertex(e.v)) {
      throw ValidationError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                            ") references a vertex outside [0," + std::to_string(vertex_count) + ")");
    }
    if (e.u == e.v) throw ValidationError("self-loop at vertex " + std::to_string(e.u));
    if (e.length <= 0) {
      throw ValidationError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                            ") has non-positive length");
    }
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.u, a.v, a.length) < std::tie(b.u, b.v, b.length);
  });
  // Duplicates keep the minimum length, which sorts first.
  for (const auto& e : edges) {
    if (!edges_.empty() && edges_.back().u == e.u && edges_.back().v == e.v) continue;
    edges_.push_back(e);
  }

  std::vector<std::size_t> deg(static_cast<std::size_t>(vertex_count) + 1, 0);
  for (const auto& e : edges_) {
    ++deg[e.u];
    ++deg[e.v];
    max_edge_length_ = std::max(max_edge_length_, e.length);
  }
  offsets_.assign(static_cast<std::size_t>(vertex_count) + 1, 0);
  for (VertexId v = 0; v < vertex_count; ++v) offsets_[v + 1] = offsets_[v] + deg[v];
  arcs_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges_) {
    arcs_[fill[e.u]++] = Arc{e.v, e.length};
    arcs_[fill[e.v]++] = Arc{e.u, e.length};
  }
  for (VertexId v = 0; v < vertex_count; ++v) {
    std::sort(arcs_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]),
              arcs_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]),
              [](const Arc& a, const Arc& b) { return a.to < b.to; });
  }
}

VertexId RoadNetwork::snap(const Coord& position) const {
  if (!has_coords()) throw ValidationError("network has no coordinates to snap against");
  VertexId best = kNoVertex;
  double best_d2 = 0.0;
  for (VertexId v = 0; v < vertex_count_; ++v) {
    const double dlat = coords_[v].lat - position.lat;
    const double dlon = coords_[v].lon - position.lon;
    const double d2 = dlat * dlat + dlon * dlon;
    if (best == kNoVertex || d2 < best_d2) {
      best = v;
      best_d2 = d2;
    }
  }
  return best;
}

namespace {

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

RoadNetwork parse_network(std::istream& in) {
  std::string raw;
  std::size_t line_no = 0;
  long long vertex_count = -1;
  long long edge_count = -1;
  std::vector<Edge> edges;
  std::map<VertexId, Coord> coords;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip_comment(raw);
    if (blank(line)) continue;
    std::istringstream ss(line);
    if (vertex_count < 0) {
      if (!(ss >> vertex_count >> edge_count) || vertex_count < 0 || edge_count < 0) {
        throw ParseError("expected header '<vertex_count> <edge_count>'", line_no);
      }
      std::string extra;
      if (ss >> extra) throw ParseError("trailing token '" + extra + "' in header", line_no);
      continue;
    }
    std::string tag;
    ss >> tag;
    if (tag == "E") {
      long long u = 0;
      long long v = 0;
      double length = 0.0;
      if (!(ss >> u >> v >> length)) throw ParseError("expected 'E <u> <v> <length_m>'", line_no);
      if (u < 0 || v < 0 || u >= vertex_count || v >= vertex_count) {
        throw ValidationError("line " + std::to_string(line_no) + ": dangling vertex id in edge");
      }
      if (!(length > 0.0) || !std::isfinite(length)) {
        throw ValidationError("line " + std::to_string(line_no) + ": non-positive edge length");
      }
      const Meters rounded = std::max<Meters>(1, std::llround(length));
      edges.push_back(Edge{static_cast<VertexId>(u), static_cast<VertexId>(v), rounded});
    } else if (tag == "C") {
      long long id = 0;
      Coord c;
      if (!(ss >> id >> c.lat >> c.lon)) throw ParseError("expected 'C <id> <lat> <lon>'", line_no);
      if (id < 0 || id >= vertex_count) {
        throw ValidationError("line " + std::to_string(line_no) + ": dangling vertex id in coordinate");
      }
      coords[static_cast<VertexId>(id)] = c;
    } else {
      throw ParseError("unknown record '" + tag + "'", line_no);
    }
    std::string extra;
    if (ss >> extra) throw ParseError("trailing token '" + extra + "'", line_no);
  }
  if (vertex_count < 0) throw ParseError("missing header", line_no);
  if (static_cast<long long>(edges.size()) != edge_count) {
    throw ParseError("header declares " + std::to_string(edge_count) + " edges, found " +
                         std::to_string(edges.size()),
                     line_no);
  }
  std::vector<Coord> coord_table;
  if (!coords.empty()) {
    if (static_cast<long long>(coords.size()) != vertex_count) {
      throw ValidationError("coordinates given for " + std::to_string(coords.size()) + " of " +
                            std::to_string(vertex_count) + " vertices");
    }
    coord_table.reserve(coords.size());
    for (const auto& [id, c] : coords) coord_table.push_back(c);
  }
  return RoadNetwork(static_cast<VertexId>(vertex_count), std::move(edges), std::move(coord_table));
}

RoadNetwork load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open network file " + path.string());
  return parse_network(in);
}

void write_network(std::ostream& out, const RoadNetwork& net) {
  out << net.vertex_count() << ' ' << net.edge_count() << '\n';
  for (const auto& e : net.edges()) out << "E " << e.u << ' ' << e.v << ' ' << e.length << '\n';
  if (net.has_coords()) {
    out << std::setprecision(17);
    for (VertexId v = 0; v < net.vertex_count(); ++v) {
      out << "C " << v << ' ' << net.coord(v).lat << ' ' << net.coord(v).lon << '\n';
    }
  }
}

void save_network(const std::filesystem::path& path, const RoadNetwork& net) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write network file " + path.string());
  write_network(out, net);
}

}  // namespace rideshare
