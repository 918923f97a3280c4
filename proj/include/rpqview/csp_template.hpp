#pragma once

#include "rpqview/rpq.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>

namespace rpqview {

/// The tau-structure used for the certain-answer test: a pair (u,v) is
/// certain on an instance S iff S has no homomorphism into the template
/// sending u to a source node and v to a target node. Nodes are canonical
/// names of query-DFA state subsets; each tau-edge stores a witness word.
struct Template {
    GraphDb graph; // over tau
    std::set<NodeId> sources;
    std::set<NodeId> targets;
    std::map<std::tuple<NodeId, Label, NodeId>, Word> witnesses;
    Dfa q_dfa;
    std::vector<Label> sigma;

    const Word &witness(const NodeId &a, const Label &l, const NodeId &b) const;
};

struct CertVerdict {
    bool certain = false;
    std::optional<NodeMap> witness; // present iff certain == false
};

std::string subset_node_name(const std::set<int> &states);
std::set<int> parse_subset_node_name(const NodeId &name);

Template build_template(const QuerySpec &q, const ViewSpec &v);

/// Variant over prebuilt automata (used by the CFPQ regularization, where
/// the per-view languages exist only as DFAs).
Template build_template_from_dfas(const Dfa &q_dfa,
                                  const std::vector<std::string> &tau,
                                  const std::vector<Dfa> &view_dfas,
                                  const std::vector<Label> &sigma);

/// Homomorphic retract of a template with the same certain answers.
/// Shrinks by folding dominated nodes, then by searching for non-surjective
/// endomorphisms that respect the source and target sets.
Template template_core(const Template &t);

CertVerdict cert(const ViewInstance &s, const NodeId &u, const NodeId &v,
                 const Template &t);

PairSet cert_all(const ViewInstance &s, const Template &t);

/// Builds a sigma-database D' with s ⊆ V(D') edgewise and (u,v) ∉ Q(D'),
/// from a homomorphism h refuting certainty of (u,v). Both guarantees are
/// checked before returning.
GraphDb materialize_counterexample(const ViewInstance &s, const NodeMap &h,
                                   const Template &t, const QuerySpec &q,
                                   const ViewSpec &v, const NodeId &u,
                                   const NodeId &v2);

std::string dump_template(const Template &t);
Template parse_template(const std::string &text);

} // namespace rpqview
