#pragma once

#include "rpqview/graph.hpp"
#include "rpqview/rpq.hpp"

#include <optional>
#include <vector>

namespace rpqview {

/// All labeled digraphs on nodes {v1..vn} (every subset of the n^2*|alphabet|
/// possible edges), in canonical order.
std::vector<GraphDb> enumerate_dbs(const std::vector<Label> &alphabet, int n,
                                   std::size_t budget = 300'000);

/// Reference RPQ semantics by explicit walk enumeration up to the pumping
/// bound |nodes| * |dfa states| (subtrees are cut once the DFA is stuck in a
/// rejecting sink). Independent of the product-reachability evaluator.
PairSet brute_rpq_eval(const GraphDb &db, const QuerySpec &q,
                       std::size_t budget = 20'000'000);

/// Exhaustive homomorphism scan over all |dst|^|src| maps in canonical
/// order; reference for find_hom.
std::optional<NodeMap>
brute_hom(const GraphDb &src, const GraphDb &dst, const NodeMap &pin = {},
          const std::map<NodeId, std::set<NodeId>> &allowed = {},
          std::size_t budget = 50'000'000);

/// Bounded counterexample search for certain answers: a database D with
/// s ⊆ V(D) edgewise and (u,v) ∉ Q(D), over path-shaped candidates with at
/// most n nodes (plus every graph on the instance nodes when tiny). A found
/// database refutes certainty; absence is evidence only.
struct BruteCertResult {
    bool found = false;
    bool budget_exceeded = false;
    GraphDb counterexample;
};
BruteCertResult brute_cert_bounded(const ViewInstance &s, const QuerySpec &q,
                                   const ViewSpec &v, const NodeId &u,
                                   const NodeId &v2, int n);

GraphDb random_db(const std::vector<Label> &alphabet, int n, double edge_prob,
                  unsigned seed);

/// Naive reference for the pebble-game fixpoint: deletion over all (A,h)
/// with |A| <= k, exactly as defined. Used to validate pebble_solve.
bool naive_game_player1_wins(const ViewInstance &s, const GraphDb &template_graph,
                             const std::set<NodeId> &sources,
                             const std::set<NodeId> &targets, const NodeId &u,
                             const NodeId &v, int l, int k);

} // namespace rpqview
