#pragma once

#include "rpqview/errors.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace rpqview {

using NodeId = std::string;
using Label = std::string;

// Word over an alphabet of (possibly multi-character) labels.
using Word = std::vector<Label>;

std::string word_to_string(const Word &w, const std::vector<Label> &alphabet);

bool valid_token(const std::string &s);

struct EdgeT {
    NodeId src;
    Label label;
    NodeId dst;

    auto operator<=>(const EdgeT &) const = default;
};

/// Edge-labeled directed graph; the substrate for sigma-databases and
/// tau-view-instances. Immutable after construction; edges are a set.
class GraphDb {
public:
    GraphDb() = default;
    GraphDb(std::vector<Label> alphabet, std::vector<NodeId> nodes,
            std::vector<EdgeT> edges);

    const std::vector<Label> &alphabet() const { return alphabet_; }
    const std::vector<NodeId> &nodes() const { return nodes_; }
    const std::vector<EdgeT> &edges() const { return edges_; }

    bool has_node(const NodeId &n) const;
    bool has_edge(const NodeId &src, const Label &l, const NodeId &dst) const;
    int node_index(const NodeId &n) const; // -1 if absent
    int label_index(const Label &l) const; // -1 if absent

    std::size_t num_nodes() const { return nodes_.size(); }
    std::size_t num_edges() const { return edges_.size(); }

    // Indexed form: (src, label, dst) triples over node/label indices,
    // sorted. Adjacency is grouped by source.
    struct IEdge {
        int src, label, dst;
        auto operator<=>(const IEdge &) const = default;
    };
    const std::vector<IEdge> &iedges() const { return iedges_; }
    const std::vector<std::vector<IEdge>> &out_edges() const { return out_; }
    const std::vector<std::vector<IEdge>> &in_edges() const { return in_; }

    bool operator==(const GraphDb &o) const {
        return alphabet_ == o.alphabet_ && nodes_ == o.nodes_ && edges_ == o.edges_;
    }

private:
    std::vector<Label> alphabet_;  // sorted, unique
    std::vector<NodeId> nodes_;    // sorted, unique
    std::vector<EdgeT> edges_;     // sorted, unique
    std::vector<IEdge> iedges_;
    std::vector<std::vector<IEdge>> out_, in_;
};

/// Path x0 a0 x1 ... a(m-1) xm inside a host graph.
struct Path {
    std::vector<NodeId> nodes;
    Word label_word;

    bool valid_in(const GraphDb &db) const;
};

/// Partial node-to-node map between two graphs.
using NodeMap = std::map<NodeId, NodeId>;

GraphDb induced(const GraphDb &db, const std::set<NodeId> &keep);

bool is_hom(const NodeMap &map, const GraphDb &src, const GraphDb &dst);

/// Complete backtracking search for a homomorphism extending `pin`, with
/// each node's image inside its allowed set (default: all dst nodes).
/// Variable order: smallest allowed set first, ties by node id.
std::optional<NodeMap>
find_hom(const GraphDb &src, const GraphDb &dst, const NodeMap &pin = {},
         const std::map<NodeId, std::set<NodeId>> &allowed = {});

GraphDb parse_graph(const std::string &text);
std::string serialize_graph(const GraphDb &db);

} // namespace rpqview
