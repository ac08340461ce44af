#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "qlet/proof.hpp"
#include "qlet/semantics.hpp"
#include "qlet/syntax.hpp"

namespace qlet {

struct SearchConfig {
  int max_domain = 3;
  std::uint64_t max_structures = 1'000'000;
  int max_choice_atoms = 20;
  Constraint constraint = Constraint::None;
  int jobs = 1;
};

/// The constants and predicates actually occurring in a query; search only
/// interprets these.
struct QueryFragment {
  std::vector<std::string> constants;                  // sorted
  std::vector<std::pair<std::string, int>> predicates; // sorted, with arity
  // When false the free identity pairs are skipped: they cannot influence an
  // identity-free query, so one representative per class suffices.
  bool uses_identity = true;
};

QueryFragment query_fragment(const std::vector<FormulaPtr>& premises,
                             const FormulaPtr& conclusion);

/// Enumerates all structures over a fixed domain size that interpret exactly
/// the fragment and satisfy the constraint, in a fixed order with random
/// access by index.
class StructureSpace {
 public:
  StructureSpace(const QueryFragment& fragment, int domain_size, Constraint constraint);

  /// Number of structures; saturates at uint64 max.
  std::uint64_t count() const { return count_; }
  Structure at(std::uint64_t index) const;

 private:
  QueryFragment fragment_;
  std::vector<std::string> domain_;
  Constraint constraint_;
  std::vector<int> allowed_states_;  // subset of {0:neither,1:pos,2:neg,3:both}
  std::vector<std::pair<std::string, std::vector<std::string>>> tuples_;  // (pred, tuple)
  std::vector<std::pair<std::string, std::string>> free_pairs_;
  std::uint64_t count_;
};

struct Countermodel {
  Structure structure;
  ChoiceAssignment choices;
  int domain_size = 0;
};

struct Exhausted {
  int max_domain = 0;
  std::uint64_t structures_tried = 0;
};

struct CapHit {
  std::string cap;  // "max-structures" or "max-choice-atoms"
  long value = 0;
};

using SearchOutcome = std::variant<Countermodel, Exhausted, CapHit>;

/// Searches domain sizes 1..max_domain in order for a structure and valuation
/// making all premises true and the conclusion untrue. The reported
/// countermodel is the first one in enumeration order regardless of `jobs`.
SearchOutcome find_countermodel(const std::vector<FormulaPtr>& premises,
                                const FormulaPtr& conclusion, const SearchConfig& config);

}  // namespace qlet
