#include "smate/schedule.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "smate/errors.hpp"

namespace smate {

namespace {

const Field& binary_field() {
  static const Field field = Field::binary();
  return field;
}

std::string str(std::size_t v) { return std::to_string(v); }

}  // namespace

PriorityPlan PriorityPlan::from_protection_counts(std::vector<std::size_t> p, std::size_t m) {
  PriorityPlan plan;
  plan.m = m;
  for (auto pi : p) {
    if (pi > m) throw InfeasibleError("invalid plan: p_i = " + str(pi) + " exceeds m = " + str(m));
    plan.d.push_back(m - pi);
  }
  plan.p = std::move(p);
  return plan;
}

Schedule::Schedule(SchemeKind scheme, std::size_t k, std::size_t m, std::size_t t, const Field& field)
    : scheme_(scheme), k_(k), m_(m), t_(t), field_(field), grid_(k * m, PlainSlot{}) {}

void Schedule::number_plain_slots() {
  std::size_t ordinal = 0;
  std::vector<std::size_t> seq(k_, 0);
  for (std::size_t r = 0; r < m_; ++r) {
    for (std::size_t i = 0; i < k_; ++i) {
      if (auto* plain = std::get_if<PlainSlot>(&grid_[i * m_ + r])) {
        plain->data_ordinal = ordinal++;
        plain->path_seq = seq[i]++;
      }
    }
  }
}

std::vector<std::size_t> Schedule::plain_paths(std::size_t round) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < k_; ++i) {
    if (is_plain(i, round)) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> Schedule::encoded_paths(std::size_t round) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < k_; ++i) {
    if (!is_plain(i, round)) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> Schedule::round_ordinals(std::size_t round) const {
  std::vector<std::size_t> out;
  for (auto i : plain_paths(round)) out.push_back(std::get<PlainSlot>(at(i, round)).data_ordinal);
  return out;
}

Schedule single_protection(std::size_t k, std::size_t m) {
  if (k < 2) throw InfeasibleError("scheme infeasible: single protection needs k >= 2, got k = " + str(k));
  if (m < 1) throw InfeasibleError("scheme infeasible: m must be at least 1");
  const Field& f = binary_field();
  Schedule s(SchemeKind::Single, k, m, 1, f);
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t enc = r % k;
    EncodedSlot slot{EncodedScheme::XorAll, 0, {}};
    for (std::size_t i = 0; i < k; ++i) {
      if (i != enc) slot.terms.push_back({i, f.one()});
    }
    s.grid_[enc * m + r] = std::move(slot);
  }
  s.number_plain_slots();
  return s;
}

Schedule dual_protection(std::size_t n, std::size_t m, std::optional<std::pair<std::size_t, std::size_t>> protection,
                         const Field& field) {
  if (n < 3) throw InfeasibleError("scheme infeasible: dual protection needs n >= 3, got n = " + str(n));
  if (m < 1) throw InfeasibleError("scheme infeasible: m must be at least 1");
  if (field.order() <= n - 2) {
    throw FieldTooSmallError("field too small: q = " + str(field.order()) + " must exceed n - 2 = " + str(n - 2));
  }
  const auto [row0, row1] = protection.value_or(std::pair{n - 2, n - 1});
  if (row0 == row1) throw UsageError("protection paths must be distinct");
  if (row0 >= n || row1 >= n) throw UsageError("protection path index out of range");

  Schedule s(SchemeKind::Dual, n, m, 2, field);
  s.protection_ = std::pair{row0, row1};

  EncodedSlot ones{EncodedScheme::VandermondeRow, 0, {}};
  EncodedSlot powers{EncodedScheme::VandermondeRow, 1, {}};
  std::size_t ordinal = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == row0 || i == row1) continue;
    ones.terms.push_back({i, field.one()});
    powers.terms.push_back({i, field.pow(field.generator(), ordinal++)});
  }
  for (std::size_t r = 0; r < m; ++r) {
    s.grid_[row0 * m + r] = ones;
    s.grid_[row1 * m + r] = powers;
  }
  s.number_plain_slots();
  return s;
}

Schedule priority_schedule(const PriorityPlan& plan, std::size_t t) {
  const std::size_t k = plan.p.size();
  const std::size_t m = plan.m;
  if (k < 2) throw InfeasibleError("scheme infeasible: priority scheme needs k >= 2");
  if (m < 1) throw InfeasibleError("scheme infeasible: m must be at least 1");
  if (plan.d.size() != k) throw InfeasibleError("invalid plan: d and p have different lengths");
  if (t < 1 || t >= k) throw InfeasibleError("infeasible plan: t must satisfy 1 <= t < k, got t = " + str(t));
  for (std::size_t i = 0; i < k; ++i) {
    if (plan.p[i] > m) throw InfeasibleError("invalid plan: p_" + str(i) + " exceeds m");
    if (plan.d[i] + plan.p[i] != m) throw InfeasibleError("invalid plan: d_" + str(i) + " + p_" + str(i) + " != m");
  }
  const std::size_t total = std::accumulate(plan.p.begin(), plan.p.end(), std::size_t{0});
  if (total != t * m) {
    throw InfeasibleError("infeasible plan: sum of p_i is " + str(total) + " but t * m = " + str(t * m));
  }

  const Field& f = default_field();
  if (f.order() <= k - t) throw FieldTooSmallError("field too small for k - t working paths");
  Schedule s(SchemeKind::Priority, k, m, t, f);
  s.plan_ = plan;

  std::vector<std::size_t> remaining = plan.p;
  std::vector<std::size_t> order(k);
  for (std::size_t r = 0; r < m; ++r) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remaining[a] > remaining[b]; });
    std::vector<std::size_t> encoders(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(t));
    // Largest-remaining-first fails only if some path still needs more
    // protection slots than rounds are left.
    if (remaining[encoders.back()] == 0 || remaining[order[0]] > m - r) {
      throw InfeasibleError("infeasible plan: no column-exact assignment at round " + str(r));
    }
    std::sort(encoders.begin(), encoders.end());

    std::vector<std::size_t> working;
    for (std::size_t i = 0; i < k; ++i) {
      if (!std::binary_search(encoders.begin(), encoders.end(), i)) working.push_back(i);
    }
    for (std::size_t row = 0; row < t; ++row) {
      EncodedSlot slot{EncodedScheme::PriorityXor, row, {}};
      for (std::size_t ord = 0; ord < working.size(); ++ord) {
        slot.terms.push_back({working[ord], f.pow(f.generator(), row * ord)});
      }
      s.grid_[encoders[row] * m + r] = std::move(slot);
      --remaining[encoders[row]];
    }
  }
  s.number_plain_slots();
  return s;
}

std::size_t capacity(const Schedule& sched) { return sched.k() - sched.t(); }

std::string render(const Schedule& sched) {
  std::vector<std::string> cells(sched.k() * sched.m());
  std::size_t width = 1;
  for (std::size_t i = 0; i < sched.k(); ++i) {
    for (std::size_t r = 0; r < sched.m(); ++r) {
      const auto& slot = sched.at(i, r);
      auto& cell = cells[i * sched.m() + r];
      cell = std::holds_alternative<PlainSlot>(slot) ? "P" + str(std::get<PlainSlot>(slot).data_ordinal) : "E";
      width = std::max(width, cell.size());
    }
  }
  const std::string last_label = "L" + str(sched.k() - 1);
  std::ostringstream out;
  for (std::size_t i = 0; i < sched.k(); ++i) {
    std::string label = "L" + str(i);
    label.resize(last_label.size(), ' ');
    out << label;
    for (std::size_t r = 0; r < sched.m(); ++r) {
      std::string cell = cells[i * sched.m() + r];
      if (r + 1 < sched.m()) cell.resize(width, ' ');
      out << ' ' << cell;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace smate
