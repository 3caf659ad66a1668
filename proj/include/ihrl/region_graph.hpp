#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ihrl/compression.hpp"
#include "ihrl/option.hpp"
#include "ihrl/worker.hpp"

namespace ihrl {

struct EdgeStats {
  long attempts = 0;
  long successes = 0;

  /// Empirical P_Z(z'|z, o_{z,z'}); 0 while there are no attempts.
  double success_rate() const { return attempts > 0 ? double(successes) / double(attempts) : 0.0; }
  bool operator==(const EdgeStats&) const = default;
};

using Edge = std::pair<RegionId, RegionId>;

/// The agent's running estimate of the invariant SMDP: regions seen so far,
/// observed neighbor relations, one navigate option (with its worker) per
/// edge and an implicit exploration option per region.
class RegionGraph {
 public:
  struct Discovery {
    bool new_region = false;
    bool new_edge = false;
  };

  RegionGraph(WorkerConfig worker_config, ObservationEncoder encoder, std::uint64_t seed);

  bool has_region(RegionId z) const { return regions_.count(z) > 0; }
  /// Registers a region without an incoming edge (the start region).
  bool add_region(RegionId z);
  Discovery observe_transition(RegionId z, RegionId z2);
  double record_option_outcome(const Edge& edge, bool success);

  bool has_edge(const Edge& e) const { return edges_.count(e) > 0; }
  std::vector<RegionId> neighbors(RegionId z) const;
  Worker& worker(const Edge& e);
  const Worker& worker(const Edge& e) const;
  const EdgeStats& stats(const Edge& e) const;

  const std::set<RegionId>& regions() const { return regions_; }
  std::vector<Edge> edges() const;
  std::size_t num_edges() const { return edges_.size(); }
  /// Navigate options plus one exploration option per region.
  std::size_t num_options() const { return edges_.size() + regions_.size(); }
  double mean_edge_success() const;

  const WorkerConfig& worker_config() const { return worker_config_; }
  const ObservationEncoder& encoder() const { return encoder_; }
  std::uint64_t seed() const { return seed_; }

  /// Graphviz text; edge labels carry successes/attempts.
  std::string to_dot() const;

  bool operator==(const RegionGraph& o) const;

  // Persistence hooks: insert a fully formed edge.
  void restore_edge(const Edge& e, Worker worker, EdgeStats stats);

 private:
  struct EdgeData {
    Worker worker;
    EdgeStats stats;
    bool operator==(const EdgeData&) const = default;
  };

  WorkerConfig worker_config_;
  ObservationEncoder encoder_;
  std::uint64_t seed_;
  std::set<RegionId> regions_;
  std::map<Edge, EdgeData> edges_;
};

/// Per-option worker seed so option learners are independent of creation order.
std::uint64_t option_seed(std::uint64_t base, const OptionKey& key);

}  // namespace ihrl
