#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Dense>

namespace smate {

struct FlowKey {
  std::uint32_t src_addr = 0;
  std::uint32_t dst_addr = 0;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
  std::uint8_t protocol = 0;

  friend auto operator<=>(const FlowKey&, const FlowKey&) = default;
};

/// FNV-1a-64 over the 13 key bytes, fields in declaration order, big-endian.
std::uint64_t flow_hash(const FlowKey& key);

/// flow_hash(key) mod working_paths. Throws UsageError for zero paths.
std::size_t assign_flow(const FlowKey& key, std::size_t working_paths);

/// Traffic split and the per-path marginal-delay estimates it was measured at.
struct PathLoad {
  Eigen::VectorXd rates;
  Eigen::VectorXd congestion;

  static PathLoad uniform(std::size_t k);
};

inline constexpr double kSimplexTolerance = 1e-9;

/// Throws UsageError if rates are negative, do not sum to 1 within
/// kSimplexTolerance, or the two vectors differ in length.
void validate(const PathLoad& load);

/// Projection used by balance_step: clamp below at zero,
/// then renormalize to unit sum.
template <typename Derived>
Eigen::VectorXd clamp_to_simplex(const Eigen::MatrixBase<Derived>& r) {
  Eigen::VectorXd out = r.cwiseMax(0.0);
  const double total = out.sum();
  if (total <= 0.0) return Eigen::VectorXd::Constant(r.size(), 1.0 / static_cast<double>(r.size()));
  return out / total;
}

/// One gradient-projection step r <- P(r - step * (c - mean(c))).
/// Throws UsageError for step <= 0.
PathLoad balance_step(const PathLoad& load, double step);

/// max c_i - min c_i over paths with positive rate.
double congestion_gap(const PathLoad& load);

struct DelaySample {
  double rate = 0.0;
  double delay = 0.0;
};

/// Finite-difference d(delay)/d(rate) per path from its two most recent
/// samples. Paths with fewer than two samples, or two samples at the same
/// rate, keep `previous`. Non-finite estimates are replaced by the largest
/// finite estimate of the call.
Eigen::VectorXd monitor(const std::vector<std::vector<DelaySample>>& samples, const Eigen::VectorXd& previous);

/// Pins each flow to a path the first time it is seen. Later splits only
/// affect flows that arrive afterwards.
class FlowTable {
 public:
  /// Places a new flow by mapping its hash onto the cumulative split;
  /// returns the stored path for a known flow.
  std::size_t place(const FlowKey& key, const Eigen::VectorXd& rates);

  std::size_t size() const { return flows_.size(); }
  const std::map<FlowKey, std::size_t>& flows() const { return flows_; }

 private:
  std::map<FlowKey, std::size_t> flows_;
};

}  // namespace smate
