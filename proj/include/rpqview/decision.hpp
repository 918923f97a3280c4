#pragma once

#include "rpqview/csp_template.hpp"
#include "rpqview/rpq.hpp"

#include <optional>
#include <string>

namespace rpqview {

struct Verdict {
    enum class Status { Refuted, NoCounterexampleUpTo, Holds, BudgetExceeded };
    Status status = Status::Holds;
    int bound = 0;                // for NoCounterexampleUpTo
    std::optional<Word> evidence_word;
    std::optional<std::pair<GraphDb, GraphDb>> evidence_pair;
    std::string note;             // family used / proof note
};

std::string verdict_to_string(const Verdict &v, const std::vector<Label> &sigma);

struct SearchBudget {
    std::size_t max_databases = 300'000; // enumeration cap
    std::size_t max_pair_family = 3'000; // databases kept for pairwise search
    std::size_t max_states = 200'000;    // lazy-automaton memo cap
    unsigned seed = 20240901;
};

/// Bounded refutation of determinacy: enumerate databases (exhaustively when
/// the count fits the budget, otherwise a documented structured family),
/// group by view image, and report any group with diverging query answers.
Verdict check_determinacy_bounded(const QuerySpec &q, const ViewSpec &v,
                                  int max_nodes, const SearchBudget &b = {});

/// Word-based monotone-determinacy check: every w in L(Q) with |w| <= max_len
/// must have certain endpoints on V(P_w) (and endpoints in the view domain).
Verdict check_monotone_words(const QuerySpec &q, const ViewSpec &v,
                             const Template &t, int max_len);

/// Bounded refutation of monotonicity over database pairs:
/// V(D) ⊆ V(D') with Q(D) ⊄ Q(D').
Verdict check_monotone_pairs_bounded(const QuerySpec &q, const ViewSpec &v,
                                     int max_nodes, const SearchBudget &b = {});

/// Full decision of monotone determinacy: emptiness of L(Q) ∩ BadWords via a
/// lazily explored NFA whose states track (template node, view-product state)
/// pairs; subsumption-pruned, memoized, budgeted.
Verdict decide_monotone_full(const QuerySpec &q, const ViewSpec &v,
                             const Template &t, const SearchBudget &b = {});

} // namespace rpqview
