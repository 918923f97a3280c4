#include "rpqview/oracle.hpp"

#include "rpqview/errors.hpp"
#include "rpqview/preimage.hpp"

#include <algorithm>
#include <functional>
#include <random>

namespace rpqview {

std::vector<GraphDb> enumerate_dbs(const std::vector<Label> &alphabet, int n,
                                   std::size_t budget) {
    if (n < 0)
        throw Error("enumerate_dbs: n >= 0 required");
    std::vector<NodeId> nodes;
    for (int i = 1; i <= n; ++i)
        nodes.push_back("v" + std::to_string(i));
    std::vector<EdgeT> slots;
    for (const auto &a : nodes)
        for (const auto &l : alphabet)
            for (const auto &b : nodes)
                slots.push_back({a, l, b});
    if (slots.size() >= 63)
        throw BudgetExceeded("enumerate_dbs: edge-slot space too large");
    std::uint64_t count = 1ull << slots.size();
    if (count > budget)
        throw BudgetExceeded("enumerate_dbs: " + std::to_string(count) +
                             " graphs exceed budget");
    std::vector<GraphDb> out;
    out.reserve(count);
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        std::vector<EdgeT> edges;
        for (std::size_t i = 0; i < slots.size(); ++i)
            if (mask & (1ull << i))
                edges.push_back(slots[i]);
        out.emplace_back(alphabet, nodes, std::move(edges));
    }
    return out;
}

PairSet brute_rpq_eval(const GraphDb &db, const QuerySpec &q, std::size_t budget) {
    Dfa qd = to_min_dfa(q.regex);
    // rejecting sink states (no final reachable) let us cut walk subtrees
    std::vector<char> coreach(qd.num_states, 0);
    for (int s = 0; s < qd.num_states; ++s)
        coreach[s] = qd.is_final[s];
    bool changed = true;
    while (changed) {
        changed = false;
        for (int s = 0; s < qd.num_states; ++s)
            for (int l = 0; l < static_cast<int>(qd.alphabet.size()); ++l)
                if (!coreach[s] && coreach[qd.delta[s][l]]) {
                    coreach[s] = 1;
                    changed = true;
                }
    }
    std::vector<int> lmap(db.alphabet().size());
    for (std::size_t i = 0; i < db.alphabet().size(); ++i) {
        auto it = std::lower_bound(qd.alphabet.begin(), qd.alphabet.end(),
                                   db.alphabet()[i]);
        if (it == qd.alphabet.end() || *it != db.alphabet()[i])
            throw AlphabetMismatch("brute_rpq_eval: label not in query alphabet");
        lmap[i] = static_cast<int>(it - qd.alphabet.begin());
    }

    int bound = static_cast<int>(db.num_nodes()) * qd.num_states;
    PairSet out;
    std::size_t steps = 0;
    std::function<void(int, int, int, int)> walk = [&](int start, int node,
                                                       int state, int len) {
        if (++steps > budget)
            throw BudgetExceeded("brute_rpq_eval: walk budget exceeded");
        if (qd.is_final[state])
            out.emplace(db.nodes()[start], db.nodes()[node]);
        if (len >= bound)
            return;
        for (const auto &ie : db.out_edges()[node]) {
            int next = qd.delta[state][lmap[ie.label]];
            if (coreach[next])
                walk(start, ie.dst, next, len + 1);
        }
    };
    for (int x = 0; x < static_cast<int>(db.num_nodes()); ++x)
        walk(x, x, qd.initial, 0);
    return out;
}

std::optional<NodeMap> brute_hom(const GraphDb &src, const GraphDb &dst,
                                 const NodeMap &pin,
                                 const std::map<NodeId, std::set<NodeId>> &allowed,
                                 std::size_t budget) {
    int n = static_cast<int>(src.num_nodes());
    int m = static_cast<int>(dst.num_nodes());
    if (n == 0)
        return NodeMap{};
    if (m == 0)
        return std::nullopt;
    // odometer over all m^n maps in canonical order
    std::vector<int> digits(n, 0);
    std::size_t steps = 0;
    while (true) {
        if (++steps > budget)
            throw BudgetExceeded("brute_hom: map budget exceeded");
        NodeMap map;
        for (int i = 0; i < n; ++i)
            map[src.nodes()[i]] = dst.nodes()[digits[i]];
        bool ok = true;
        for (const auto &[k, v] : pin)
            if (map.at(k) != v)
                ok = false;
        if (ok)
            for (const auto &[k, s] : allowed)
                if (!s.count(map.at(k)))
                    ok = false;
        if (ok && is_hom(map, src, dst))
            return map;
        int i = n - 1;
        while (i >= 0 && digits[i] == m - 1)
            digits[i--] = 0;
        if (i < 0)
            return std::nullopt;
        ++digits[i];
    }
}

BruteCertResult brute_cert_bounded(const ViewInstance &s, const QuerySpec &q,
                                   const ViewSpec &v, const NodeId &u,
                                   const NodeId &v2, int n) {
    BruteCertResult out;
    // tiny instances: every graph on the instance node set
    if (n <= 4 && s.graph.num_nodes() <= static_cast<std::size_t>(n)) {
        std::vector<NodeId> nodes = s.graph.nodes();
        std::vector<EdgeT> slots;
        for (const auto &a : nodes)
            for (const auto &l : v.sigma)
                for (const auto &b : nodes)
                    slots.push_back({a, l, b});
        if (slots.size() < 24) {
            std::uint64_t count = 1ull << slots.size();
            for (std::uint64_t mask = 0; mask < count; ++mask) {
                std::vector<EdgeT> edges;
                for (std::size_t i = 0; i < slots.size(); ++i)
                    if (mask & (1ull << i))
                        edges.push_back(slots[i]);
                GraphDb db(v.sigma, nodes, std::move(edges));
                ViewInstance img = apply_view(db, v);
                bool contains = true;
                for (const auto &e : s.graph.edges())
                    if (!img.graph.has_edge(e.src, e.label, e.dst)) {
                        contains = false;
                        break;
                    }
                if (contains && !rpq_eval(db, q).count({u, v2})) {
                    out.found = true;
                    out.counterexample = std::move(db);
                    return out;
                }
            }
        }
    }
    auto r = sound_counterexample_search(s, q, v, u, v2, n);
    if (r.status == SoundSearchResult::Status::Found) {
        out.found = true;
        out.counterexample = std::move(r.db);
    } else if (r.status == SoundSearchResult::Status::BudgetExceeded) {
        out.budget_exceeded = true;
    }
    return out;
}

GraphDb random_db(const std::vector<Label> &alphabet, int n, double edge_prob,
                  unsigned seed) {
    if (edge_prob < 0 || edge_prob > 1)
        throw Error("random_db: edge_prob in [0,1] required");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<NodeId> nodes;
    for (int i = 1; i <= n; ++i)
        nodes.push_back("v" + std::to_string(i));
    std::vector<EdgeT> edges;
    for (const auto &a : nodes)
        for (const auto &l : alphabet)
            for (const auto &b : nodes)
                if (coin(rng) < edge_prob)
                    edges.push_back({a, l, b});
    return GraphDb(alphabet, std::move(nodes), std::move(edges));
}

namespace {

struct NaiveGame {
    const GraphDb &sg, &tg;
    const std::set<NodeId> &sources, &targets;
    int n, m, l, k;
    int u_idx, v_idx;
    std::vector<std::vector<int>> domains;
    std::vector<std::vector<std::vector<int>>> homs;
    std::vector<std::vector<char>> alive;

    bool img_ok(int node, int img) const {
        if (node == u_idx && !sources.count(tg.nodes()[img]))
            return false;
        if (node == v_idx && !targets.count(tg.nodes()[img]))
            return false;
        return true;
    }

    bool edge_ok(const std::vector<int> &dom, const std::vector<int> &img) const {
        for (std::size_t i = 0; i < dom.size(); ++i)
            for (std::size_t j = 0; j < dom.size(); ++j)
                for (const auto &ie : sg.out_edges()[dom[i]])
                    if (ie.dst == dom[j] &&
                        !tg.has_edge(tg.nodes()[img[i]],
                                     sg.alphabet()[ie.label],
                                     tg.nodes()[img[j]]))
                        return false;
        return true;
    }
};

} // namespace

bool naive_game_player1_wins(const ViewInstance &s, const GraphDb &template_graph,
                             const std::set<NodeId> &sources,
                             const std::set<NodeId> &targets, const NodeId &u,
                             const NodeId &v, int l, int k) {
    NaiveGame g{s.graph, template_graph, sources, targets, 0, 0, l, k, -1, -1,
                {}, {}, {}};
    g.n = static_cast<int>(s.graph.num_nodes());
    g.m = static_cast<int>(template_graph.num_nodes());
    g.u_idx = s.graph.node_index(u);
    g.v_idx = s.graph.node_index(v);
    int kk = std::min(k, g.n);

    // all domains of size 1..k
    std::vector<int> cur;
    std::function<void(int)> gen = [&](int start) {
        if (!cur.empty())
            g.domains.push_back(cur);
        if (static_cast<int>(cur.size()) == kk)
            return;
        for (int i = start; i < g.n; ++i) {
            cur.push_back(i);
            gen(i + 1);
            cur.pop_back();
        }
    };
    gen(0);

    for (const auto &dom : g.domains) {
        std::vector<std::vector<int>> hs;
        std::vector<int> img(dom.size(), 0);
        std::function<void(std::size_t)> rec = [&](std::size_t pos) {
            if (pos == dom.size()) {
                if (g.edge_ok(dom, img))
                    hs.push_back(img);
                return;
            }
            for (int t = 0; t < g.m; ++t) {
                if (!g.img_ok(dom[pos], t))
                    continue;
                img[pos] = t;
                rec(pos + 1);
            }
        };
        rec(0);
        g.homs.push_back(hs);
        g.alive.emplace_back(hs.size(), 1);
    }

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t a = 0; a < g.domains.size(); ++a)
            for (std::size_t h = 0; h < g.homs[a].size(); ++h) {
                if (!g.alive[a][h])
                    continue;
                for (std::size_t b = 0; b < g.domains.size(); ++b) {
                    // overlap
                    std::vector<std::pair<int, int>> ov;
                    for (std::size_t i = 0; i < g.domains[a].size(); ++i)
                        for (std::size_t j = 0; j < g.domains[b].size(); ++j)
                            if (g.domains[a][i] == g.domains[b][j])
                                ov.emplace_back(static_cast<int>(i),
                                                static_cast<int>(j));
                    if (static_cast<int>(ov.size()) > l)
                        continue; // not a legal move
                    bool found = false;
                    for (std::size_t h2 = 0; h2 < g.homs[b].size() && !found;
                         ++h2) {
                        if (!g.alive[b][h2])
                            continue;
                        bool agrees = true;
                        for (const auto &[i, j] : ov)
                            if (g.homs[a][h][i] != g.homs[b][h2][j])
                                agrees = false;
                        found = agrees;
                    }
                    if (!found) {
                        g.alive[a][h] = 0;
                        changed = true;
                        break;
                    }
                }
            }
    }
    for (std::size_t a = 0; a < g.domains.size(); ++a) {
        bool any = false;
        for (char c : g.alive[a])
            any = any || c;
        if (!any)
            return true;
    }
    return false;
}

} // namespace rpqview
