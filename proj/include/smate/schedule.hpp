#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "smate/gf.hpp"

namespace smate {

enum class SchemeKind : std::uint8_t { Single, Dual, Priority };

enum class EncodedScheme : std::uint8_t { XorAll, VandermondeRow, PriorityXor };

struct PlainSlot {
  /// Position in the cycle's logical output stream.
  std::size_t data_ordinal = 0;
  /// Index of this slot among the Plain slots of its path.
  std::size_t path_seq = 0;
};

/// One term of an encoded combination: coefficient applied to the Plain
/// payload carried on `path` in the same round.
struct CodingTerm {
  std::size_t path = 0;
  FieldElement coeff;
};

struct EncodedSlot {
  EncodedScheme scheme = EncodedScheme::XorAll;
  /// Rank among the Encoded slots of the round, ordered by path index.
  std::size_t row = 0;
  std::vector<CodingTerm> terms;
};

using Slot = std::variant<PlainSlot, EncodedSlot>;

struct PriorityPlan {
  std::vector<std::size_t> d;
  std::vector<std::size_t> p;
  std::size_t m = 0;

  /// Builds d_i = m - p_i.
  static PriorityPlan from_protection_counts(std::vector<std::size_t> p, std::size_t m);
};

/// k x m slot matrix for one cycle. Immutable once built by one of the
/// generator functions below.
class Schedule {
 public:
  SchemeKind scheme() const { return scheme_; }
  std::size_t k() const { return k_; }
  std::size_t m() const { return m_; }
  std::size_t t() const { return t_; }
  const Field& field() const { return field_; }

  const Slot& at(std::size_t path, std::size_t round) const { return grid_.at(path * m_ + round); }
  bool is_plain(std::size_t path, std::size_t round) const {
    return std::holds_alternative<PlainSlot>(at(path, round));
  }

  std::vector<std::size_t> plain_paths(std::size_t round) const;
  std::vector<std::size_t> encoded_paths(std::size_t round) const;
  /// Data ordinals carried in `round`, ascending.
  std::vector<std::size_t> round_ordinals(std::size_t round) const;
  /// Plain payloads per cycle, (k - t) * m.
  std::size_t payloads_per_cycle() const { return (k_ - t_) * m_; }

  /// Dual scheme only: the (row 0, row 1) protection paths.
  const std::optional<std::pair<std::size_t, std::size_t>>& protection_paths() const { return protection_; }
  /// Priority scheme only.
  const std::optional<PriorityPlan>& plan() const { return plan_; }

 private:
  friend Schedule single_protection(std::size_t, std::size_t);
  friend Schedule dual_protection(std::size_t, std::size_t, std::optional<std::pair<std::size_t, std::size_t>>,
                                  const Field&);
  friend Schedule priority_schedule(const PriorityPlan&, std::size_t);

  Schedule(SchemeKind scheme, std::size_t k, std::size_t m, std::size_t t, const Field& field);
  void number_plain_slots();

  SchemeKind scheme_;
  std::size_t k_;
  std::size_t m_;
  std::size_t t_;
  Field field_;
  std::vector<Slot> grid_;
  std::optional<std::pair<std::size_t, std::size_t>> protection_;
  std::optional<PriorityPlan> plan_;
};

/// Rotating single protection: round r carries the XOR of its k-1 Plain
/// payloads on path (r mod k). Throws InfeasibleError for k < 2.
Schedule single_protection(std::size_t k, std::size_t m);

/// Two fixed protection paths carrying the all-ones row and the
/// (1, a, a^2, ...) row over the working paths. Defaults to the two
/// highest-indexed paths. Throws InfeasibleError for n < 3,
/// FieldTooSmallError when q <= n - 2, UsageError for bad path indices.
Schedule dual_protection(std::size_t n, std::size_t m,
                         std::optional<std::pair<std::size_t, std::size_t>> protection_paths = std::nullopt,
                         const Field& field = default_field());

/// Path i carries p_i Encoded slots; each round, the t paths with the most
/// remaining protection slots (lowest index on ties) encode.
Schedule priority_schedule(const PriorityPlan& plan, std::size_t t);

/// Plain payloads per round, k - t.
std::size_t capacity(const Schedule& sched);

/// One line per path, `L<i>` followed by `P<ordinal>` / `E` cells.
std::string render(const Schedule& sched);

}  // namespace smate
