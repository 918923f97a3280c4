#pragma once

#include "rpqview/csp_template.hpp"
#include "rpqview/pebble.hpp"

#include <string>
#include <vector>

namespace rpqview {

/// Datalog program over the tau EDB symbols plus the implicit unary `node`
/// relation (one fact per instance node). Heads are IDB predicates; every
/// head variable must occur in the body.
struct DatalogProgram {
    struct Atom {
        std::string pred;
        std::vector<std::string> vars;
    };
    struct Rule {
        Atom head;
        std::vector<Atom> body;
    };
    std::vector<std::string> edb; // tau symbols
    std::vector<std::pair<std::string, int>> idb; // name, arity
    std::vector<Rule> rules;
    std::string goal;

    int max_idb_arity() const;
    int max_rule_vars() const;
};

/// Canonical program evaluating the (l, k=l+1) game against the template:
/// IDB predicates index sets H of template-node m-tuples (m <= l) and mean
/// "every surviving response maps these m elements into H"; the goal fires
/// once some H = ∅ is derived. Currently emitted for l = 1 (k = 2); larger
/// parameters raise EmissionTooLarge when the predicate space outgrows the
/// budget.
DatalogProgram emit_datalog(const Template &t, const GameConfig &cfg,
                            std::size_t max_predicates = 4096,
                            std::size_t max_rules = 250'000);

/// Naive least-fixpoint evaluation; returns the goal relation restricted to
/// binary tuples over instance nodes.
PairSet datalog_naive_eval(const DatalogProgram &p, const ViewInstance &s);

std::string serialize_datalog(const DatalogProgram &p);
DatalogProgram parse_datalog(const std::string &text);

} // namespace rpqview
