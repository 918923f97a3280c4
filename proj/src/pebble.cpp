#include "rpqview/pebble.hpp"

#include "rpqview/errors.hpp"

#include <algorithm>
#include <unordered_set>

namespace rpqview {

namespace {

struct GameInstance {
    const GraphDb &sg;
    const GraphDb &tg;
    int n, m;
    int u_idx, v_idx;
    std::vector<char> src_ok, tgt_ok; // allowed template images for u / v
    std::vector<std::vector<std::vector<char>>> tadj; // [label][a][b]
    std::vector<int> lmap; // instance label -> template label

    GameInstance(const ViewInstance &s, const Template &t, const NodeId &u,
                 const NodeId &v)
        : sg(s.graph), tg(t.graph) {
        n = static_cast<int>(sg.num_nodes());
        m = static_cast<int>(tg.num_nodes());
        u_idx = sg.node_index(u);
        v_idx = sg.node_index(v);
        if (u_idx < 0 || v_idx < 0)
            throw UnknownNode("pebble_solve: pinned node not in instance");
        src_ok.assign(m, 0);
        tgt_ok.assign(m, 0);
        for (int i = 0; i < m; ++i) {
            if (t.sources.count(tg.nodes()[i]))
                src_ok[i] = 1;
            if (t.targets.count(tg.nodes()[i]))
                tgt_ok[i] = 1;
        }
        int la = static_cast<int>(tg.alphabet().size());
        tadj.assign(la, std::vector<std::vector<char>>(m, std::vector<char>(m, 0)));
        for (const auto &ie : tg.iedges())
            tadj[ie.label][ie.src][ie.dst] = 1;
        lmap.resize(sg.alphabet().size());
        for (std::size_t i = 0; i < sg.alphabet().size(); ++i)
            lmap[i] = tg.label_index(sg.alphabet()[i]);
    }

    bool image_allowed(int node, int img) const {
        if (node == u_idx && !src_ok[img])
            return false;
        if (node == v_idx && !tgt_ok[img])
            return false;
        return true;
    }

    // edges of the induced substructure on `dom` (positions into dom)
    struct DomEdge {
        int a, b, label; // positions in dom; label is a template label index
    };
    std::vector<DomEdge> dom_edges(const std::vector<int> &dom) const {
        std::vector<DomEdge> out;
        for (std::size_t i = 0; i < dom.size(); ++i)
            for (const auto &ie : sg.out_edges()[dom[i]]) {
                if (lmap[ie.label] < 0)
                    continue;
                for (std::size_t j = 0; j < dom.size(); ++j)
                    if (dom[j] == ie.dst)
                        out.push_back({static_cast<int>(i), static_cast<int>(j),
                                       lmap[ie.label]});
            }
        return out;
    }

    // all homomorphisms s[dom] -> t with pinning, as image vectors
    std::vector<std::vector<uint8_t>> homs(const std::vector<int> &dom) const {
        auto edges = dom_edges(dom);
        std::vector<std::vector<uint8_t>> out;
        std::vector<uint8_t> img(dom.size());
        std::function<void(std::size_t)> rec = [&](std::size_t pos) {
            if (pos == dom.size()) {
                out.push_back(img);
                return;
            }
            for (int t = 0; t < m; ++t) {
                if (!image_allowed(dom[pos], t))
                    continue;
                img[pos] = static_cast<uint8_t>(t);
                bool ok = true;
                for (const auto &e : edges) {
                    if (static_cast<std::size_t>(std::max(e.a, e.b)) > pos)
                        continue;
                    if (static_cast<std::size_t>(std::max(e.a, e.b)) == pos &&
                        !tadj[e.label][img[e.a]][img[e.b]]) {
                        ok = false;
                        break;
                    }
                }
                if (ok)
                    rec(pos + 1);
            }
        };
        rec(0);
        return out;
    }
};

void enumerate_domains(int n, int maxsize, std::vector<std::vector<int>> &out) {
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int start) {
        if (!cur.empty())
            out.push_back(cur);
        if (static_cast<int>(cur.size()) == maxsize)
            return;
        for (int i = start; i < n; ++i) {
            cur.push_back(i);
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(0);
}

std::string project_key(const std::vector<uint8_t> &img,
                        const std::vector<int> &positions) {
    std::string key;
    key.reserve(positions.size());
    for (int p : positions)
        key.push_back(static_cast<char>(img[p]));
    return key;
}

} // namespace

GameResult pebble_solve(const ViewInstance &s, const Template &t, const NodeId &u,
                        const NodeId &v, const GameConfig &cfg) {
    if (cfg.l < 1 || cfg.l > cfg.k)
        throw Error("pebble_solve: need 1 <= l <= k");
    GameInstance gi(s, t, u, v);
    int n = gi.n;

    // A full pinned homomorphism is a Player-2 strategy by restriction.
    std::map<NodeId, std::set<NodeId>> allowed;
    allowed[u] = t.sources;
    if (u == v) {
        std::set<NodeId> both;
        for (const auto &x : t.sources)
            if (t.targets.count(x))
                both.insert(x);
        allowed[u] = both;
    } else {
        allowed[v] = t.targets;
    }
    auto full = find_hom(s.graph, t.graph, {}, allowed);
    if (full) {
        GameResult r;
        r.winner = Player::Player2;
        r.surviving_family.emplace_back(s.graph.nodes(), *full);
        return r;
    }
    if (n <= cfg.k) {
        // One round reveals everything: no full hom means Player 1 wins.
        GameResult r;
        r.winner = Player::Player1;
        r.empty_domain = s.graph.nodes();
        return r;
    }

    int k = cfg.k, l = cfg.l;
    std::vector<std::vector<int>> domains;
    enumerate_domains(n, k, domains);
    int nd = static_cast<int>(domains.size());

    // survivors per domain
    std::vector<std::vector<std::vector<uint8_t>>> homs(nd);
    std::vector<std::vector<char>> alive(nd);
    std::size_t total = 0;
    for (int d = 0; d < nd; ++d) {
        homs[d] = gi.homs(domains[d]);
        alive[d].assign(homs[d].size(), 1);
        total += homs[d].size();
        if (total > cfg.max_positions)
            throw ResourceLimit("pebble_solve: position cap exceeded (" +
                                std::to_string(total) + " positions)");
    }

    // legal moves: ordered (A, B) with |A ∩ B| <= l; store overlap positions
    struct Move {
        int target;
        std::vector<int> apos, bpos; // overlap positions in A and in B
    };
    std::vector<std::vector<Move>> moves(nd);
    for (int a = 0; a < nd; ++a)
        for (int b = 0; b < nd; ++b) {
            std::vector<int> apos, bpos;
            std::size_t i = 0, j = 0;
            while (i < domains[a].size() && j < domains[b].size()) {
                if (domains[a][i] == domains[b][j]) {
                    apos.push_back(static_cast<int>(i));
                    bpos.push_back(static_cast<int>(j));
                    ++i;
                    ++j;
                } else if (domains[a][i] < domains[b][j])
                    ++i;
                else
                    ++j;
            }
            if (static_cast<int>(apos.size()) <= l)
                moves[a].push_back({b, std::move(apos), std::move(bpos)});
        }

    // deletion to fixpoint
    bool changed = true;
    while (changed) {
        changed = false;
        // projection sets of alive homs, per (domain, overlap-position-list)
        std::map<std::pair<int, std::vector<int>>, std::unordered_set<std::string>>
            proj;
        for (int a = 0; a < nd; ++a)
            for (const auto &mv : moves[a]) {
                auto key = std::make_pair(mv.target, mv.bpos);
                if (proj.count(key))
                    continue;
                auto &set = proj[key];
                for (std::size_t h = 0; h < homs[mv.target].size(); ++h)
                    if (alive[mv.target][h])
                        set.insert(project_key(homs[mv.target][h], mv.bpos));
            }
        for (int a = 0; a < nd; ++a) {
            for (std::size_t h = 0; h < homs[a].size(); ++h) {
                if (!alive[a][h])
                    continue;
                for (const auto &mv : moves[a]) {
                    const auto &set = proj.at({mv.target, mv.bpos});
                    if (!set.count(project_key(homs[a][h], mv.apos))) {
                        alive[a][h] = 0;
                        changed = true;
                        break;
                    }
                }
            }
        }
    }

    GameResult r;
    for (int d = 0; d < nd; ++d) {
        bool any = false;
        for (char c : alive[d])
            any = any || c;
        if (!any) {
            r.winner = Player::Player1;
            for (int idx : domains[d])
                r.empty_domain.push_back(s.graph.nodes()[idx]);
            return r;
        }
    }
    r.winner = Player::Player2;
    for (int d = 0; d < nd; ++d)
        for (std::size_t h = 0; h < homs[d].size(); ++h) {
            if (!alive[d][h])
                continue;
            std::vector<NodeId> dom;
            NodeMap map;
            for (std::size_t i = 0; i < domains[d].size(); ++i) {
                dom.push_back(s.graph.nodes()[domains[d][i]]);
                map[dom.back()] = t.graph.nodes()[homs[d][h][i]];
            }
            r.surviving_family.emplace_back(std::move(dom), std::move(map));
        }
    return r;
}

long long default_l(const QuerySpec &q, const ViewSpec &v, const Template &t) {
    std::vector<RegexAst> views;
    for (const auto &name : v.tau)
        views.push_back(v.definitions.at(name));
    ProductDfa prod = build_view_product(views);
    return static_cast<long long>(t.graph.num_nodes()) * prod.n_of_v;
}

PairSet rewrite_eval(const ViewInstance &s, const Template &t, long long l,
                     std::size_t max_positions) {
    if (l < 1)
        throw Error("rewrite_eval: need l >= 1");
    GameConfig cfg;
    // clamp to the instance size; the game only ever inspects domains of at
    // most |s| nodes, so larger parameters play identically
    long long n = static_cast<long long>(s.graph.num_nodes());
    cfg.l = static_cast<int>(std::min(l, n + 1));
    cfg.k = static_cast<int>(std::min(l + 1, n + 1));
    if (cfg.l > cfg.k)
        cfg.l = cfg.k;
    cfg.max_positions = max_positions;
    PairSet out;
    for (const auto &u : s.graph.nodes())
        for (const auto &v : s.graph.nodes())
            if (pebble_solve(s, t, u, v, cfg).winner == Player::Player1)
                out.emplace(u, v);
    return out;
}

} // namespace rpqview
