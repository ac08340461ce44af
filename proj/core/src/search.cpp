#include "qlet/search.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <thread>

namespace qlet {

namespace {

void collect_predicates(const FormulaPtr& f, std::map<std::string, int>& out, bool& identity) {
  if (f->kind == Conn::Atom) out[f->pred] = static_cast<int>(f->args.size());
  if (f->kind == Conn::Identity) identity = true;
  for (const auto& s : f->sub) collect_predicates(s, out, identity);
}

}  // namespace

QueryFragment query_fragment(const std::vector<FormulaPtr>& premises,
                             const FormulaPtr& conclusion) {
  std::set<std::string> constants;
  std::map<std::string, int> predicates;
  bool identity = false;
  auto add = [&](const FormulaPtr& f) {
    for (const auto& c : constants_of(f))
      if (c.empty() || c[0] != '#') constants.insert(c);
    collect_predicates(f, predicates, identity);
  };
  for (const auto& p : premises) add(p);
  add(conclusion);
  QueryFragment frag;
  frag.uses_identity = identity;
  frag.constants.assign(constants.begin(), constants.end());
  frag.predicates.assign(predicates.begin(), predicates.end());
  return frag;
}

StructureSpace::StructureSpace(const QueryFragment& fragment, int domain_size,
                               Constraint constraint)
    : fragment_(fragment), constraint_(constraint) {
  if (domain_size < 1) throw EvalError("domain size must be at least 1");
  for (int i = 1; i <= domain_size; ++i) domain_.push_back("d" + std::to_string(i));

  switch (constraint) {
    case Constraint::None: allowed_states_ = {0, 1, 2, 3}; break;
    case Constraint::E1:   allowed_states_ = {1, 2, 3}; break;
    case Constraint::E2:   allowed_states_ = {0, 1, 2}; break;
    case Constraint::E1E2: allowed_states_ = {1, 2}; break;
  }

  for (const auto& [pred, arity] : fragment_.predicates) {
    std::vector<std::vector<std::string>> tuples{{}};
    for (int i = 0; i < arity; ++i) {
      std::vector<std::vector<std::string>> next;
      for (const auto& t : tuples)
        for (const auto& e : domain_) {
          auto t2 = t;
          t2.push_back(e);
          next.push_back(std::move(t2));
        }
      tuples = std::move(next);
    }
    for (auto& t : tuples) tuples_.emplace_back(pred, std::move(t));
  }

  if (fragment_.uses_identity) {
    for (const auto& a : domain_)
      for (const auto& b : domain_) {
        bool diagonal = a == b;
        // E1 forces off-diagonal pairs in, E2 forces diagonal pairs out; the
        // remaining pairs are free binary choices.
        if (diagonal ? !constraint_has_e2(constraint) : !constraint_has_e1(constraint))
          free_pairs_.emplace_back(a, b);
      }
  }

  unsigned __int128 count = 1;
  auto mul = [&](std::uint64_t m) {
    count *= m;
    if (count > std::numeric_limits<std::uint64_t>::max())
      count = std::numeric_limits<std::uint64_t>::max();
  };
  for (size_t i = 0; i < fragment_.constants.size(); ++i) mul(domain_.size());
  for (size_t i = 0; i < tuples_.size(); ++i) mul(allowed_states_.size());
  for (size_t i = 0; i < free_pairs_.size(); ++i) mul(2);
  count_ = static_cast<std::uint64_t>(count);
}

Structure StructureSpace::at(std::uint64_t index) const {
  Structure s;
  s.domain = domain_;

  std::uint64_t id_subsets = std::uint64_t{1} << free_pairs_.size();
  std::uint64_t id_idx = index % id_subsets;
  index /= id_subsets;

  std::vector<int> states(tuples_.size(), 0);
  for (size_t i = tuples_.size(); i-- > 0;) {
    states[i] = allowed_states_[index % allowed_states_.size()];
    index /= allowed_states_.size();
  }

  std::vector<size_t> assignment(fragment_.constants.size(), 0);
  for (size_t i = fragment_.constants.size(); i-- > 0;) {
    assignment[i] = index % domain_.size();
    index /= domain_.size();
  }

  for (size_t i = 0; i < fragment_.constants.size(); ++i)
    s.assign[fragment_.constants[i]] = domain_[assignment[i]];

  for (const auto& [pred, arity] : fragment_.predicates) {
    s.preds[pred].arity = arity;
  }
  for (size_t i = 0; i < tuples_.size(); ++i) {
    auto& interp = s.preds[tuples_[i].first];
    if (states[i] & 1) interp.pos.insert(tuples_[i].second);
    if (states[i] & 2) interp.neg.insert(tuples_[i].second);
  }

  if (constraint_has_e1(constraint_)) {
    for (const auto& a : domain_)
      for (const auto& b : domain_)
        if (a != b) s.identity_neg.emplace(a, b);
  }
  for (size_t q = 0; q < free_pairs_.size(); ++q)
    if ((id_idx >> (free_pairs_.size() - 1 - q)) & 1) s.identity_neg.insert(free_pairs_[q]);

  return s;
}

namespace {

struct Hit {
  std::uint64_t index;
  SearchOutcome outcome;
};

// Evaluates the query on structures [begin, end) of the space with `jobs`
// workers and returns the lowest-index hit (countermodel or cap overflow).
std::optional<Hit> scan_range(const StructureSpace& space,
                              const std::vector<FormulaPtr>& premises,
                              const FormulaPtr& conclusion, int max_choice_atoms,
                              std::uint64_t begin, std::uint64_t end, int jobs,
                              int domain_size) {
  std::mutex mu;
  std::optional<Hit> best;
  std::atomic<std::uint64_t> best_index{std::numeric_limits<std::uint64_t>::max()};

  auto worker = [&](int tid) {
    for (std::uint64_t i = begin + tid; i < end; i += jobs) {
      if (i >= best_index.load(std::memory_order_relaxed)) break;
      Structure s = space.at(i);
      std::optional<SearchOutcome> found;
      try {
        auto result = entails_on_structure(s, premises, conclusion, max_choice_atoms);
        if (auto* cm = std::get_if<ChoiceAssignment>(&result))
          found = Countermodel{std::move(s), std::move(*cm), domain_size};
      } catch (const CapError& e) {
        found = CapHit{"max-choice-atoms", e.value()};
      }
      if (found) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < best_index.load()) {
          best_index.store(i);
          best = Hit{i, std::move(*found)};
        }
      }
    }
  };

  if (jobs <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < jobs; ++t) threads.emplace_back(worker, t);
    for (auto& t : threads) t.join();
  }
  return best;
}

}  // namespace

SearchOutcome find_countermodel(const std::vector<FormulaPtr>& premises,
                                const FormulaPtr& conclusion, const SearchConfig& config) {
  QueryFragment frag = query_fragment(premises, conclusion);
  int jobs = std::max(1, config.jobs);
  std::uint64_t batch = std::uint64_t{64} * jobs;
  std::uint64_t tried = 0;

  for (int n = 1; n <= config.max_domain; ++n) {
    StructureSpace space(frag, n, config.constraint);
    std::uint64_t total = space.count();
    for (std::uint64_t start = 0; start < total; start += batch) {
      if (tried >= config.max_structures)
        return CapHit{"max-structures", static_cast<long>(config.max_structures)};
      std::uint64_t end = std::min({total, start + batch,
                                    start + (config.max_structures - tried)});
      auto hit = scan_range(space, premises, conclusion, config.max_choice_atoms, start, end,
                            jobs, n);
      tried += end - start;
      if (hit) {
        if (auto* cm = std::get_if<Countermodel>(&hit->outcome)) {
          // Replay before reporting; a countermodel must verify on its own.
          Evaluator ev(cm->structure, cm->choices);
          for (const auto& p : premises)
            if (ev.evaluate(p) != 1) throw EvalError("countermodel failed premise replay");
          if (ev.evaluate(conclusion) != 0)
            throw EvalError("countermodel failed conclusion replay");
        }
        return std::move(hit->outcome);
      }
      if (end < start + batch && end == total) break;
    }
  }
  return Exhausted{config.max_domain, tried};
}

}  // namespace qlet
