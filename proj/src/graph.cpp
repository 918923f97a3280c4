#include "rpqview/graph.hpp"

#include <algorithm>
#include <sstream>

namespace rpqview {

bool valid_token(const std::string &s) {
    if (s.empty())
        return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
            return false;
    return true;
}

std::string word_to_string(const Word &w, const std::vector<Label> &alphabet) {
    bool single = true;
    for (const auto &l : alphabet)
        if (l.size() != 1)
            single = false;
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!single && i > 0)
            out += ' ';
        out += w[i];
    }
    return out;
}

static std::vector<std::string> sorted_unique(std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

GraphDb::GraphDb(std::vector<Label> alphabet, std::vector<NodeId> nodes,
                 std::vector<EdgeT> edges)
    : alphabet_(sorted_unique(std::move(alphabet))),
      nodes_(sorted_unique(std::move(nodes))) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (const auto &e : edges) {
        if (!has_node(e.src) || !has_node(e.dst))
            throw UnknownNode("edge endpoint not declared: " + e.src + " " + e.dst);
        if (label_index(e.label) < 0)
            throw UnknownLabel("edge label not in alphabet: " + e.label);
    }
    edges_ = std::move(edges);
    out_.resize(nodes_.size());
    in_.resize(nodes_.size());
    for (const auto &e : edges_) {
        IEdge ie{node_index(e.src), label_index(e.label), node_index(e.dst)};
        iedges_.push_back(ie);
        out_[ie.src].push_back(ie);
        in_[ie.dst].push_back(ie);
    }
}

bool GraphDb::has_node(const NodeId &n) const { return node_index(n) >= 0; }

bool GraphDb::has_edge(const NodeId &src, const Label &l, const NodeId &dst) const {
    return std::binary_search(edges_.begin(), edges_.end(), EdgeT{src, l, dst});
}

int GraphDb::node_index(const NodeId &n) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), n);
    if (it == nodes_.end() || *it != n)
        return -1;
    return static_cast<int>(it - nodes_.begin());
}

int GraphDb::label_index(const Label &l) const {
    auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), l);
    if (it == alphabet_.end() || *it != l)
        return -1;
    return static_cast<int>(it - alphabet_.begin());
}

bool Path::valid_in(const GraphDb &db) const {
    if (nodes.empty() || label_word.size() + 1 != nodes.size())
        return false;
    for (std::size_t i = 0; i < label_word.size(); ++i)
        if (!db.has_edge(nodes[i], label_word[i], nodes[i + 1]))
            return false;
    return true;
}

GraphDb induced(const GraphDb &db, const std::set<NodeId> &keep) {
    for (const auto &n : keep)
        if (!db.has_node(n))
            throw UnknownNode("induced: unknown node " + n);
    std::vector<EdgeT> edges;
    for (const auto &e : db.edges())
        if (keep.count(e.src) && keep.count(e.dst))
            edges.push_back(e);
    return GraphDb(db.alphabet(), {keep.begin(), keep.end()}, std::move(edges));
}

bool is_hom(const NodeMap &map, const GraphDb &src, const GraphDb &dst) {
    for (const auto &n : src.nodes())
        if (!map.count(n))
            throw PartialMap("is_hom: node unassigned: " + n);
    for (const auto &[k, v] : map) {
        if (!src.has_node(k))
            throw UnknownNode("is_hom: map domain node not in source: " + k);
        if (!dst.has_node(v))
            throw UnknownNode("is_hom: map range node not in target: " + v);
    }
    for (const auto &e : src.edges())
        if (!dst.has_edge(map.at(e.src), e.label, map.at(e.dst)))
            return false;
    return true;
}

namespace {

struct HomSearch {
    const GraphDb &src;
    const GraphDb &dst;
    int n;
    // candidate sets per source node index, as boolean masks over dst nodes
    std::vector<std::vector<char>> cand;
    std::vector<int> assign; // dst node index or -1
    // label -> adjacency matrices of dst
    std::vector<std::vector<std::vector<char>>> dstadj; // [label][a][b]

    HomSearch(const GraphDb &s, const GraphDb &d) : src(s), dst(d) {
        n = static_cast<int>(src.num_nodes());
        int m = static_cast<int>(dst.num_nodes());
        cand.assign(n, std::vector<char>(m, 1));
        assign.assign(n, -1);
        int la = static_cast<int>(dst.alphabet().size());
        dstadj.assign(la, std::vector<std::vector<char>>(m, std::vector<char>(m, 0)));
        for (const auto &ie : dst.iedges())
            dstadj[ie.label][ie.src][ie.dst] = 1;
    }

    int cand_count(int v) const {
        int c = 0;
        for (char b : cand[v])
            c += b;
        return c;
    }

    bool consistent_with_assigned(int v, int img) const {
        for (const auto &ie : src.out_edges()[v]) {
            int dl = dst.label_index(src.alphabet()[ie.label]);
            if (dl < 0)
                return false;
            int w = ie.dst;
            if (w == v) {
                if (!dstadj[dl][img][img])
                    return false;
            } else if (assign[w] >= 0 && !dstadj[dl][img][assign[w]])
                return false;
        }
        for (const auto &ie : src.in_edges()[v]) {
            int dl = dst.label_index(src.alphabet()[ie.label]);
            if (dl < 0)
                return false;
            int w = ie.src;
            if (w != v && assign[w] >= 0 && !dstadj[dl][assign[w]][img])
                return false;
        }
        return true;
    }

    bool search() {
        int best = -1, bestc = -1;
        for (int v = 0; v < n; ++v) {
            if (assign[v] >= 0)
                continue;
            int c = cand_count(v);
            if (best < 0 || c < bestc) {
                best = v;
                bestc = c;
            }
        }
        if (best < 0)
            return true; // all assigned
        for (int img = 0; img < static_cast<int>(dst.num_nodes()); ++img) {
            if (!cand[best][img])
                continue;
            if (!consistent_with_assigned(best, img))
                continue;
            assign[best] = img;
            // forward prune neighbours
            std::vector<std::pair<int, std::vector<char>>> saved;
            bool dead = false;
            auto prune = [&](int w, auto keep) {
                if (assign[w] >= 0)
                    return;
                saved.emplace_back(w, cand[w]);
                bool any = false;
                for (int b = 0; b < static_cast<int>(cand[w].size()); ++b) {
                    if (cand[w][b] && !keep(b))
                        cand[w][b] = 0;
                    any = any || cand[w][b];
                }
                if (!any)
                    dead = true;
            };
            for (const auto &ie : src.out_edges()[best]) {
                if (dead)
                    break;
                int dl = dst.label_index(src.alphabet()[ie.label]);
                if (ie.dst != best)
                    prune(ie.dst, [&](int b) { return dstadj[dl][img][b]; });
            }
            for (const auto &ie : src.in_edges()[best]) {
                if (dead)
                    break;
                int dl = dst.label_index(src.alphabet()[ie.label]);
                if (ie.src != best)
                    prune(ie.src, [&](int b) { return dstadj[dl][b][img]; });
            }
            if (!dead && search())
                return true;
            for (auto &[w, c] : saved)
                cand[w] = std::move(c);
            assign[best] = -1;
        }
        return false;
    }
};

} // namespace

std::optional<NodeMap> find_hom(const GraphDb &src, const GraphDb &dst,
                                const NodeMap &pin,
                                const std::map<NodeId, std::set<NodeId>> &allowed) {
    for (const auto &[k, v] : pin) {
        if (!src.has_node(k))
            throw UnknownNode("find_hom: pinned node not in source: " + k);
        if (!dst.has_node(v))
            throw UnknownNode("find_hom: pinned image not in target: " + v);
    }
    for (const auto &[k, s] : allowed) {
        if (!src.has_node(k))
            throw UnknownNode("find_hom: allowed-set node not in source: " + k);
        for (const auto &v : s)
            if (!dst.has_node(v))
                throw UnknownNode("find_hom: allowed-set image not in target: " + v);
    }
    if (src.num_nodes() == 0)
        return NodeMap{};
    if (dst.num_nodes() == 0)
        return std::nullopt;
    HomSearch hs(src, dst);
    for (const auto &[k, s] : allowed) {
        int v = src.node_index(k);
        for (int b = 0; b < static_cast<int>(dst.num_nodes()); ++b)
            if (!s.count(dst.nodes()[b]))
                hs.cand[v][b] = 0;
    }
    for (const auto &[k, img] : pin) {
        int v = src.node_index(k);
        int b = dst.node_index(img);
        for (int j = 0; j < static_cast<int>(dst.num_nodes()); ++j)
            if (j != b)
                hs.cand[v][j] = 0;
    }
    if (!hs.search())
        return std::nullopt;
    NodeMap out;
    for (int v = 0; v < static_cast<int>(src.num_nodes()); ++v)
        out[src.nodes()[v]] = dst.nodes()[hs.assign[v]];
    // defensive re-check of the contract before returning
    if (!is_hom(out, src, dst))
        throw Error("find_hom: internal check failed");
    return out;
}

GraphDb parse_graph(const std::string &text) {
    std::vector<Label> alphabet;
    bool have_header = false;
    std::vector<NodeId> nodes;
    std::vector<EdgeT> edges;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok) || tok[0] == '#')
            continue;
        auto fail = [&](const std::string &msg) -> ParseError {
            return ParseError("line " + std::to_string(lineno) + ": " + msg);
        };
        if (tok == "alphabet") {
            std::string l;
            while (ls >> l) {
                if (!valid_token(l))
                    throw fail("bad label token: " + l);
                alphabet.push_back(l);
            }
            have_header = true;
        } else if (tok == "node") {
            std::string n;
            if (!(ls >> n) || !valid_token(n))
                throw fail("expected node id");
            nodes.push_back(n);
            std::string extra;
            if (ls >> extra)
                throw fail("trailing tokens after node id");
        } else if (tok == "edge") {
            std::string s, l, d;
            if (!(ls >> s >> l >> d) || !valid_token(s) || !valid_token(l) ||
                !valid_token(d))
                throw fail("expected: edge <src> <label> <dst>");
            if (have_header &&
                std::find(alphabet.begin(), alphabet.end(), l) == alphabet.end())
                throw UnknownLabel("line " + std::to_string(lineno) +
                                   ": undeclared label " + l);
            nodes.push_back(s);
            nodes.push_back(d);
            if (!have_header)
                alphabet.push_back(l);
            edges.push_back({s, l, d});
        } else {
            throw fail("unknown directive: " + tok);
        }
    }
    return GraphDb(std::move(alphabet), std::move(nodes), std::move(edges));
}

std::string serialize_graph(const GraphDb &db) {
    std::ostringstream out;
    out << "alphabet";
    for (const auto &l : db.alphabet())
        out << ' ' << l;
    out << '\n';
    for (const auto &n : db.nodes())
        out << "node " << n << '\n';
    for (const auto &e : db.edges())
        out << "edge " << e.src << ' ' << e.label << ' ' << e.dst << '\n';
    return out.str();
}

} // namespace rpqview
