// rideshare: generate instances, build the partition index, run and audit
// simulations.
//
// Exit codes: 0 success, 1 usage, 2 invalid input, 3 audit failure.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rideshare/io.hpp"
#include "rideshare/partition.hpp"
#include "rideshare/partition_index.hpp"
#include "rideshare/shortest_path.hpp"
#include "rideshare/simulator.hpp"

namespace fs = std::filesystem;
using namespace rideshare;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitAudit = 3;

const char* const kSettingNames[] = {
    "w_min",  "theta",      "capacity",       "drivers",     "dt_s",         "partitions",
    "speed_kmh", "algo",    "gamma",          "seed",        "relax",        "relax_w_max",
    "relax_theta_max", "relax_steps", "sa_perturbations", "sa_t0", "sa_decay", "sa_t_min",
};

// Every RunConfig key as a --flag; only flags given on the command line take
// part in resolution.
struct ConfigFlags {
  std::string file;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void attach(CLI::App* app) {
    app->add_option("--config", file, "key=value settings file")->check(CLI::ExistingFile);
    for (const char* name : kSettingNames) {
      std::string flag = std::string("--") + name;
      std::replace(flag.begin(), flag.end(), '_', '-');
      options[name] = app->add_option(flag, values[name]);
    }
  }

  RunConfig resolve() const {
    std::map<std::string, std::string> from_file;
    if (!file.empty()) {
      std::ifstream in(file);
      if (!in) throw std::runtime_error("cannot open " + file);
      from_file = parse_config(in);
    }
    std::map<std::string, std::string> flags;
    for (const auto& [name, opt] : options) {
      if (opt->count() > 0) flags[name] = values.at(name);
    }
    return resolve_config(from_file, flags);
  }
};

struct Inputs {
  std::string network;
  std::string requests;
  std::string format = "csv";
  std::string drivers;
  std::string index;

  void attach(CLI::App* app) {
    app->add_option("--network", network, "network file")->required()->check(CLI::ExistingFile);
    app->add_option("--requests", requests, "requests file")->required()->check(CLI::ExistingFile);
    app->add_option("--format", format, "requests format")->check(CLI::IsMember({"csv", "shanghai"}));
    app->add_option("--drivers-file", drivers, "drivers CSV; otherwise `drivers` are placed at random")
        ->check(CLI::ExistingFile);
    app->add_option("--index", index, "prebuilt partition index; otherwise built from `partitions`")
        ->check(CLI::ExistingFile);
  }
};

struct World {
  RoadNetwork net;
  std::vector<RiderRequest> requests;
  Fleet fleet;
  PartitionIndex index;
  std::unique_ptr<HubLabelOracle> oracle;
};

World load_world(const Inputs& in, const RunConfig& config) {
  World w;
  w.net = load_network(in.network);
  if (in.format == "shanghai") {
    std::ifstream file(in.requests);
    if (!file) throw std::runtime_error("cannot open " + in.requests);
    w.requests = read_shanghai_csv(file, config.w_min * 60.0, config.theta);
  } else {
    w.requests = load_requests(in.requests);
  }
  if (!in.drivers.empty()) {
    w.fleet = load_drivers(in.drivers);
  } else {
    GeneratorSpec spec;
    spec.drivers = config.drivers;
    spec.capacity = config.capacity;
    spec.seed = config.seed;
    w.fleet = generate_drivers(spec, w.net);
  }
  check_against_network(w.net, w.requests, w.fleet);
  if (!in.index.empty()) {
    w.index = PartitionIndex::load(in.index);
    if (w.index.parts() < 1) throw ValidationError("index has no parts");
    for (VertexId v = 0; v < w.net.vertex_count(); ++v) {
      // Spot check that the index was built for this network.
      if (w.index.part_of(v) < 0 || w.index.part_of(v) >= w.index.parts()) {
        throw ValidationError("index does not match the network");
      }
    }
  } else {
    const PartId parts = std::min<PartId>(config.partitions, w.net.vertex_count());
    w.index = PartitionIndex(w.net, partition_network(w.net, parts, config.seed));
  }
  w.oracle = std::make_unique<HubLabelOracle>(w.net);
  return w;
}

int run_gen(const fs::path& out_dir, const GeneratorSpec& spec) {
  fs::create_directories(out_dir);
  const auto net = generate_network(spec);
  save_network(out_dir / "network.txt", net);
  save_requests(out_dir / "requests.csv", generate_requests(spec, net));
  save_drivers(out_dir / "drivers.csv", generate_drivers(spec, net));
  std::cout << "wrote " << (out_dir / "network.txt").string() << " (" << net.vertex_count() << " vertices, "
            << net.edge_count() << " edges), requests.csv (" << spec.requests << "), drivers.csv ("
            << spec.drivers << ")\n";
  return 0;
}

int run_partition(const std::string& network, PartId parts, std::uint64_t seed, const std::string& out) {
  const auto net = load_network(network);
  const auto p = partition_network(net, parts, seed);
  if (!out.empty()) {
    std::ofstream file(out);
    if (!file) throw std::runtime_error("cannot open " + out);
    file << p.parts << ' ' << p.assignment.size() << '\n';
    for (const PartId a : p.assignment) file << a << '\n';
  }
  const auto sizes = p.part_sizes();
  std::cout << "parts=" << p.parts << " cut_edges=" << p.cut_edges << " balance=" << p.balance
            << " min_part=" << *std::min_element(sizes.begin(), sizes.end())
            << " max_part=" << *std::max_element(sizes.begin(), sizes.end()) << '\n';
  return 0;
}

int run_index(const std::string& network, PartId parts, std::uint64_t seed, const std::string& out) {
  const auto net = load_network(network);
  const auto start = std::chrono::steady_clock::now();
  const PartitionIndex index(net, partition_network(net, parts, seed));
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  index.save(out);
  std::size_t bridges = 0;
  for (VertexId v = 0; v < net.vertex_count(); ++v) bridges += index.is_bridge(v) ? 1 : 0;
  std::cout << "parts=" << index.parts() << " bridges=" << bridges << " build_ms=" << ms << '\n';
  return 0;
}

int run_simulate(const Inputs& inputs, const ConfigFlags& flags, const std::string& metrics,
                 const std::string& events, bool timing) {
  const RunConfig config = flags.resolve();
  config.validate();
  World w = load_world(inputs, config);
  SimConfig sim = config.sim_config();
  sim.record_timing = timing;
  sim.record_events = !events.empty();
  const SimResult result = simulate(sim, w.net, *w.oracle, w.index, std::move(w.fleet), w.requests);

  std::ostringstream csv;
  csv << "# " << config.echo() << '\n';
  write_metrics_csv(csv, result);
  if (metrics.empty() || metrics == "-") {
    std::cout << csv.str();
  } else {
    std::ofstream file(metrics, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open " + metrics);
    file << csv.str();
  }
  if (!events.empty()) {
    std::ofstream file(events, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open " + events);
    write_events_json(file, result.events);
  }
  std::cerr << "requests=" << result.total_requests << " served=" << result.served
            << " sr=" << result.served_rate() << " windows=" << result.windows.size()
            << " undelivered=" << result.undelivered << '\n';
  return 0;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int run_bench(const Inputs& inputs, const ConfigFlags& flags, const std::string& algos) {
  RunConfig config = flags.resolve();
  config.validate();
  const auto names = split_list(algos);
  if (names.empty()) throw ValidationError("--algo lists no matcher");
  for (const auto& n : names) parse_algorithm(n);
  World w = load_world(inputs, config);

  std::printf("%-6s %8s %8s %7s %12s %12s %10s %10s %10s %10s %10s %10s %11s %11s %11s\n", "algo", "windows",
              "served", "sr", "cand_pairs", "examined", "lemma3", "lemma4", "lemma5", "lemma6", "lemma7", "lemma8",
              "match_ms", "update_ms", "max_win_ms");
  for (const auto& name : names) {
    config.algo = name;
    SimConfig sim = config.sim_config();
    sim.record_timing = true;
    const SimResult r = simulate(sim, w.net, *w.oracle, w.index, w.fleet, w.requests);
    double match = 0.0;
    double update = 0.0;
    double worst = 0.0;
    std::uint64_t pairs = 0;
    for (const auto& m : r.windows) {
      match += m.match_ms;
      update += m.update_ms;
      worst = std::max(worst, m.match_ms + m.update_ms);
      pairs += m.candidate_pairs;
    }
    const auto& c = r.counters;
    std::printf("%-6s %8zu %8lld %7.4f %12llu %12llu %10llu %10llu %10llu %10llu %10llu %10llu %11.1f %11.1f %11.1f\n",
                name.c_str(), r.windows.size(), static_cast<long long>(r.served), r.served_rate(),
                static_cast<unsigned long long>(pairs), static_cast<unsigned long long>(c.examined),
                static_cast<unsigned long long>(c.lemma3), static_cast<unsigned long long>(c.lemma4),
                static_cast<unsigned long long>(c.lemma5), static_cast<unsigned long long>(c.lemma6),
                static_cast<unsigned long long>(c.lemma7), static_cast<unsigned long long>(c.lemma8), match, update,
                worst);
    std::fflush(stdout);
  }
  return 0;
}

int run_audit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  const EventLog log = read_events_json(in);
  const AuditReport report = audit(log);
  for (const auto& v : report.violations) std::cout << "violation: " << v << '\n';
  std::cout << (report.ok ? "audit passed" : "audit FAILED") << ": " << report.riders_checked << " riders, "
            << report.violations.size() << " violations\n";
  return report.ok ? 0 : kExitAudit;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ridesharing order dispatch simulator"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate a network, requests and drivers");
  GeneratorSpec spec;
  std::string gen_out = ".";
  std::string kind = "grid";
  gen->add_option("--out-dir", gen_out, "output directory");
  gen->add_option("--kind", kind)->check(CLI::IsMember({"grid", "planar"}));
  gen->add_option("--side", spec.side, "vertices per side");
  gen->add_option("--edge-min", spec.edge_min, "meters");
  gen->add_option("--edge-max", spec.edge_max, "meters");
  gen->add_option("--requests", spec.requests);
  gen->add_option("--rate", spec.rate, "requests per second");
  gen->add_option("--hotspots", spec.hotspots);
  gen->add_option("--hotspot-share", spec.hotspot_share);
  gen->add_option("--rn-max", spec.rn_max);
  gen->add_option("--w-min-s", spec.w_min_s);
  gen->add_option("--w-max-s", spec.w_max_s);
  gen->add_option("--theta-min", spec.theta_min);
  gen->add_option("--theta-max", spec.theta_max);
  gen->add_option("--drivers", spec.drivers);
  gen->add_option("--capacity", spec.capacity);
  gen->add_option("--seed", spec.seed);

  auto* part = app.add_subcommand("partition", "partition a network and report the cut");
  std::string part_net;
  std::string part_out;
  PartId parts = 500;
  std::uint64_t part_seed = 1;
  part->add_option("--network", part_net)->required()->check(CLI::ExistingFile);
  part->add_option("--partitions", parts);
  part->add_option("--seed", part_seed);
  part->add_option("--out", part_out, "assignment file");

  auto* idx = app.add_subcommand("index", "build and save the partition index");
  std::string idx_net;
  std::string idx_out;
  PartId idx_parts = 500;
  std::uint64_t idx_seed = 1;
  idx->add_option("--network", idx_net)->required()->check(CLI::ExistingFile);
  idx->add_option("--partitions", idx_parts);
  idx->add_option("--seed", idx_seed);
  idx->add_option("--out", idx_out)->required();

  auto* sim = app.add_subcommand("simulate", "run the window simulation");
  Inputs sim_inputs;
  ConfigFlags sim_flags;
  std::string metrics;
  std::string events;
  bool timing = false;
  sim_inputs.attach(sim);
  sim_flags.attach(sim);
  sim->add_option("--metrics", metrics, "metrics CSV (default stdout)");
  sim->add_option("--events", events, "event log JSON");
  sim->add_flag("--timing", timing, "record wall-clock columns");

  auto* bench = app.add_subcommand("bench", "compare matchers on one instance");
  Inputs bench_inputs;
  ConfigFlags bench_flags;
  bench_inputs.attach(bench);
  bench_flags.attach(bench);
  // --algo is part of the config flags; the bench reads it as a list.
  bench_flags.options.erase("algo");
  bench->remove_option(bench->get_option("--algo"));
  std::string algos = "df,df+p";
  bench->add_option("--algo", algos, "comma-separated matchers");

  auto* aud = app.add_subcommand("audit", "check an event log against the rider constraints");
  std::string audit_path;
  aud->add_option("events", audit_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen) {
      spec.kind = kind == "planar" ? GeneratorSpec::Kind::kPlanar : GeneratorSpec::Kind::kGrid;
      return run_gen(gen_out, spec);
    }
    if (*part) return run_partition(part_net, parts, part_seed, part_out);
    if (*idx) return run_index(idx_net, idx_parts, idx_seed, idx_out);
    if (*sim) return run_simulate(sim_inputs, sim_flags, metrics, events, timing);
    if (*bench) return run_bench(bench_inputs, bench_flags, algos);
    if (*aud) return run_audit(audit_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitUsage;
}
