#include "ihrl/region_graph.hpp"

#include <sstream>

#include "ihrl/errors.hpp"

namespace ihrl {

std::uint64_t option_seed(std::uint64_t base, const OptionKey& key) {
  const std::uint64_t packed = (std::uint64_t(key.kind) << 56) ^ (std::uint64_t(std::uint32_t(key.region)) << 24) ^
                               (std::uint64_t(std::uint32_t(key.target + 1)) << 8) ^ (std::uint64_t(key.from) << 4) ^
                               std::uint64_t(key.to);
  return derive_seed(base, packed);
}

RegionGraph::RegionGraph(WorkerConfig worker_config, ObservationEncoder encoder, std::uint64_t seed)
    : worker_config_(std::move(worker_config)), encoder_(encoder), seed_(seed) {}

bool RegionGraph::add_region(RegionId z) {
  if (z < 0) throw UsageError("invalid region id " + std::to_string(z));
  return regions_.insert(z).second;
}

RegionGraph::Discovery RegionGraph::observe_transition(RegionId z, RegionId z2) {
  if (!has_region(z)) throw UsageError("transition from unregistered region " + std::to_string(z));
  if (z == z2) throw UsageError("a region transition needs two distinct regions");
  Discovery d;
  d.new_region = add_region(z2);
  const Edge e{z, z2};
  if (!edges_.count(e)) {
    edges_.emplace(e, EdgeData{make_worker(worker_config_, encoder_, option_seed(seed_, OptionKey::navigate(z, z2))), {}});
    d.new_edge = true;
  }
  return d;
}

double RegionGraph::record_option_outcome(const Edge& edge, bool success) {
  auto it = edges_.find(edge);
  if (it == edges_.end())
    throw UsageError("unknown edge " + std::to_string(edge.first) + "->" + std::to_string(edge.second));
  ++it->second.stats.attempts;
  if (success) ++it->second.stats.successes;
  return it->second.stats.success_rate();
}

std::vector<RegionId> RegionGraph::neighbors(RegionId z) const {
  std::vector<RegionId> out;
  for (auto it = edges_.lower_bound({z, kNoRegion}); it != edges_.end() && it->first.first == z; ++it)
    out.push_back(it->first.second);
  return out;
}

Worker& RegionGraph::worker(const Edge& e) {
  auto it = edges_.find(e);
  if (it == edges_.end()) throw UsageError("no navigate option for this edge");
  return it->second.worker;
}

const Worker& RegionGraph::worker(const Edge& e) const {
  auto it = edges_.find(e);
  if (it == edges_.end()) throw UsageError("no navigate option for this edge");
  return it->second.worker;
}

const EdgeStats& RegionGraph::stats(const Edge& e) const {
  auto it = edges_.find(e);
  if (it == edges_.end()) throw UsageError("no navigate option for this edge");
  return it->second.stats;
}

std::vector<Edge> RegionGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edges_.size());
  for (const auto& [e, _] : edges_) out.push_back(e);
  return out;
}

double RegionGraph::mean_edge_success() const {
  double sum = 0.0;
  int n = 0;
  for (const auto& [e, d] : edges_) {
    if (d.stats.attempts == 0) continue;
    sum += d.stats.success_rate();
    ++n;
  }
  return n > 0 ? sum / n : 0.0;
}

std::string RegionGraph::to_dot() const {
  std::ostringstream os;
  os << "digraph regions {\n";
  for (RegionId z : regions_) os << "  r" << z << " [label=\"" << z << "\"];\n";
  for (const auto& [e, d] : edges_)
    os << "  r" << e.first << " -> r" << e.second << " [label=\"" << d.stats.successes << "/" << d.stats.attempts
       << "\"];\n";
  os << "}\n";
  return os.str();
}

bool RegionGraph::operator==(const RegionGraph& o) const {
  return worker_config_ == o.worker_config_ && encoder_ == o.encoder_ && seed_ == o.seed_ && regions_ == o.regions_ &&
         edges_ == o.edges_;
}

void RegionGraph::restore_edge(const Edge& e, Worker worker, EdgeStats stats) {
  if (!has_region(e.first) || !has_region(e.second)) throw LoadError("edge endpoint is not a known region");
  edges_.insert_or_assign(e, EdgeData{std::move(worker), stats});
}

}  // namespace ihrl
