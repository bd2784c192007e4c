#include "smate/balancer.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "smate/errors.hpp"
#include "smate/framing.hpp"

namespace smate {

std::uint64_t flow_hash(const FlowKey& key) {
  std::array<std::uint8_t, 13> b{};
  auto put = [&b](std::size_t at, std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) b[at + i] = static_cast<std::uint8_t>(v >> (8 * (bytes - 1 - i)));
  };
  put(0, key.src_addr, 4);
  put(4, key.dst_addr, 4);
  put(8, key.src_port, 2);
  put(10, key.dst_port, 2);
  b[12] = key.protocol;
  return fnv1a64(b);
}

std::size_t assign_flow(const FlowKey& key, std::size_t working_paths) {
  if (working_paths == 0) throw UsageError("assign_flow needs at least one working path");
  return static_cast<std::size_t>(flow_hash(key) % working_paths);
}

PathLoad PathLoad::uniform(std::size_t k) {
  return {Eigen::VectorXd::Constant(static_cast<Eigen::Index>(k), 1.0 / static_cast<double>(k)),
          Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k))};
}

void validate(const PathLoad& load) {
  if (load.rates.size() == 0) throw UsageError("path load has no paths");
  if (load.rates.size() != load.congestion.size()) throw UsageError("rates and congestion differ in length");
  if ((load.rates.array() < 0.0).any()) throw UsageError("negative path rate");
  if (std::abs(load.rates.sum() - 1.0) > kSimplexTolerance) throw UsageError("path rates do not sum to 1");
}

PathLoad balance_step(const PathLoad& load, double step) {
  if (!(step > 0.0)) throw UsageError("step size must be positive");
  validate(load);
  const double mean = load.congestion.mean();
  Eigen::VectorXd next = load.rates - step * (load.congestion.array() - mean).matrix();
  return {clamp_to_simplex(next), load.congestion};
}

double congestion_gap(const PathLoad& load) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Eigen::Index i = 0; i < load.rates.size(); ++i) {
    if (load.rates[i] <= 0.0) continue;
    lo = std::min(lo, load.congestion[i]);
    hi = std::max(hi, load.congestion[i]);
  }
  return hi >= lo ? hi - lo : 0.0;
}

Eigen::VectorXd monitor(const std::vector<std::vector<DelaySample>>& samples, const Eigen::VectorXd& previous) {
  if (static_cast<Eigen::Index>(samples.size()) != previous.size()) {
    throw UsageError("monitor needs one sample series per path");
  }
  Eigen::VectorXd est = previous;
  std::vector<bool> fresh(samples.size(), false);
  double largest = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (s.size() < 2) continue;
    const auto& a = s[s.size() - 2];
    const auto& b = s[s.size() - 1];
    if (a.rate == b.rate) continue;
    const double slope = (b.delay - a.delay) / (b.rate - a.rate);
    est[static_cast<Eigen::Index>(i)] = slope;
    fresh[i] = true;
    if (std::isfinite(slope)) largest = std::max(largest, slope);
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto& e = est[static_cast<Eigen::Index>(i)];
    if (fresh[i] && !std::isfinite(e)) e = std::isfinite(largest) ? largest : previous[static_cast<Eigen::Index>(i)];
  }
  return est;
}

std::size_t FlowTable::place(const FlowKey& key, const Eigen::VectorXd& rates) {
  if (auto it = flows_.find(key); it != flows_.end()) return it->second;
  if (rates.size() == 0) throw UsageError("flow placement needs at least one path");
  // Top 53 bits of the hash as a uniform point in [0, 1).
  const double u = static_cast<double>(flow_hash(key) >> 11) * 0x1.0p-53;
  std::size_t path = static_cast<std::size_t>(rates.size() - 1);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < rates.size(); ++i) {
    acc += rates[i];
    if (u < acc) {
      path = static_cast<std::size_t>(i);
      break;
    }
  }
  flows_.emplace(key, path);
  return path;
}

}  // namespace smate
