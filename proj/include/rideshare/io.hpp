#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "rideshare/matching.hpp"
#include "rideshare/road_network.hpp"
#include "rideshare/simulator.hpp"
#include "rideshare/trip.hpp"

namespace rideshare {

// Requests CSV: id,t_s,src,dst,rn,w_s,theta (header required).
std::vector<RiderRequest> read_requests_csv(std::istream& in);
void write_requests_csv(std::ostream& out, const std::vector<RiderRequest>& requests);

/// Trace rows `timestamp,pickup_vertex,dropoff_vertex` (seconds; an optional
/// header line is skipped). Ids are assigned 1.. in file order, every request
/// carries one rider and the given w and theta; the result is sorted by time.
std::vector<RiderRequest> read_shanghai_csv(std::istream& in, double wait_s, double theta);

// Drivers CSV: id,vertex,capacity (header required). The fleet comes back
// sorted by id with empty schedules.
Fleet read_drivers_csv(std::istream& in);
void write_drivers_csv(std::ostream& out, const Fleet& fleet);

/// Throws ValidationError when a request or driver refers to a vertex the
/// network does not have.
void check_against_network(const RoadNetwork& net, const std::vector<RiderRequest>& requests, const Fleet& fleet);

/// Every setting of a run. Keys of the flat config file are the field names
/// below; w_min is in minutes.
struct RunConfig {
  double w_min = 5.0;
  double theta = 0.6;
  int capacity = 4;
  int drivers = 1000;
  double dt_s = 10.0;
  PartId partitions = 500;
  double speed_kmh = 48.0;
  std::string algo = "gr+p";
  std::size_t gamma = 50;
  std::uint64_t seed = 1;
  std::string relax = "off";
  double relax_w_max = 2.0;
  double relax_theta_max = 2.0;
  int relax_steps = 4;
  std::uint64_t sa_perturbations = 10000;
  double sa_t0 = 5.0;
  double sa_decay = 0.001;
  double sa_t_min = 4.95;

  /// Applies key=value settings; throws ValidationError on an unknown key or
  /// a value that does not parse.
  void apply(const std::map<std::string, std::string>& settings);
  /// All settings as `key=value` joined by spaces, in declaration order.
  std::string echo() const;
  /// Throws ValidationError on out-of-range values.
  void validate() const;
  SimConfig sim_config() const;
};

/// Flat `key = value` lines; '#' starts a comment. Throws ParseError.
std::map<std::string, std::string> parse_config(std::istream& in);

/// Defaults, then the file, then explicit flags.
RunConfig resolve_config(const std::map<std::string, std::string>& file,
                         const std::map<std::string, std::string>& flags);

struct GeneratorSpec {
  enum class Kind { kGrid, kPlanar };
  Kind kind = Kind::kGrid;
  int side = 10;  // vertices per side; the network has side * side vertices
  Meters edge_min = 50;
  Meters edge_max = 200;
  int requests = 6000;
  double rate = 20.0;  // requests per second
  int hotspots = 4;
  double hotspot_share = 0.5;  // fraction of sources drawn near a hotspot
  int rn_max = 3;
  double w_min_s = 300.0;
  double w_max_s = 300.0;
  double theta_min = 0.6;
  double theta_max = 0.6;
  int drivers = 1000;
  int capacity = 4;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Grid: 4-neighbour lattice. Planar: the lattice plus one random diagonal
/// per cell, which keeps the embedding planar. Coordinates follow the
/// lattice at 0.001 degree spacing.
RoadNetwork generate_network(const GeneratorSpec& spec);
/// Poisson arrivals at `rate`, sorted by time, ids 1..requests.
std::vector<RiderRequest> generate_requests(const GeneratorSpec& spec, const RoadNetwork& net);
/// Ids 1..drivers at uniform random vertices.
Fleet generate_drivers(const GeneratorSpec& spec, const RoadNetwork& net);

std::vector<RiderRequest> load_requests(const std::filesystem::path& path);
Fleet load_drivers(const std::filesystem::path& path);
void save_requests(const std::filesystem::path& path, const std::vector<RiderRequest>& requests);
void save_drivers(const std::filesystem::path& path, const Fleet& fleet);

}  // namespace rideshare
