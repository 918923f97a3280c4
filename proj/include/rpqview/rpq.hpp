#pragma once

#include "rpqview/automata.hpp"
#include "rpqview/graph.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace rpqview {

struct QuerySpec {
    std::vector<Label> sigma;
    RegexAst regex;
};

struct CfgDef {
    std::string start;
    // productions in source order; symbols are nonterminals or terminals
    std::vector<std::pair<std::string, std::vector<std::string>>> productions;
};

/// A named family of RPQs (and optionally CFG views) from sigma to tau.
struct ViewSpec {
    std::vector<Label> sigma;
    std::vector<std::string> tau; // view names, in declaration order
    std::map<std::string, RegexAst> definitions;
    std::map<std::string, CfgDef> cfg_definitions; // cfgview blocks, if any

    bool is_regular() const { return cfg_definitions.empty(); }
};

/// A tau-structure; by default its node set is the set of nodes occurring
/// in at least one view tuple.
struct ViewInstance {
    GraphDb graph;
};

using PairSet = std::set<std::pair<NodeId, NodeId>>;

/// { (x,y) : some path from x to y has its label word in L(q) }, computed by
/// reachability in the product of db with the minimal DFA of q.
PairSet rpq_eval(const GraphDb &db, const QuerySpec &q);
PairSet rpq_eval(const GraphDb &db, const Dfa &q_dfa);

ViewInstance apply_view(const GraphDb &db, const ViewSpec &v,
                        bool keep_all_nodes = false);

GraphDb path_of_word(const Word &w, const std::vector<Label> &alphabet);

struct SimPartition {
    int k = 0;
    std::vector<std::set<int>> classes; // partition of positions 0..k
};

/// ~_k equivalence on positions of the simple path P_w: xi ~_k xj iff for
/// every view V and every r >= k, (xi,xr) in V(P_w) <=> (xj,xr) in V(P_w).
SimPartition sim_classes(const Word &w, const ViewSpec &v, int k);

/// Parsed contents of a spec file (view + query definitions).
struct SpecFile {
    ViewSpec view;
    QuerySpec query;
    bool has_query = false;
};

SpecFile parse_spec(const std::string &text);
std::string serialize_spec(const SpecFile &spec);

} // namespace rpqview
