#include "rpqview/preimage.hpp"

#include "rpqview/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

namespace rpqview {

namespace {

struct Segment {
    NodeId src, dst;
    Word word;
    auto operator<=>(const Segment &) const = default;
    int fresh_cost() const { return static_cast<int>(word.size()) - 1; }
};

struct CoverSearch {
    const ViewInstance &s;
    const ViewSpec &v;
    std::vector<Label> sigma;
    bool exact;                      // exact image vs sound containment
    std::optional<std::pair<NodeId, NodeId>> avoid; // sound mode: pair to keep out of Q
    const QuerySpec *q = nullptr;
    int fresh_budget;
    int seg_cap;
    std::size_t max_steps;
    std::size_t steps = 0;
    bool budget_hit = false;

    std::vector<Dfa> view_dfas;
    std::vector<std::vector<char>> coreach; // per view, states reaching a final
    std::set<Segment> segments;
    int fresh_used = 0;
    std::string fresh_prefix = "zf";
    std::unordered_set<std::string> visited;

    CoverSearch(const ViewInstance &si, const ViewSpec &vi, bool ex, int budget,
                int cap, std::size_t steps_cap)
        : s(si), v(vi), sigma(vi.sigma), exact(ex), fresh_budget(budget),
          seg_cap(cap), max_steps(steps_cap) {
        std::sort(sigma.begin(), sigma.end());
        for (const auto &name : v.tau)
            view_dfas.push_back(to_min_dfa(v.definitions.at(name)));
        for (const auto &d : view_dfas) {
            // states from which some final state is reachable
            std::vector<char> cr(d.num_states, 0);
            bool changed = true;
            for (int q2 = 0; q2 < d.num_states; ++q2)
                cr[q2] = d.is_final[q2];
            while (changed) {
                changed = false;
                for (int q2 = 0; q2 < d.num_states; ++q2)
                    for (int l = 0; l < static_cast<int>(d.alphabet.size()); ++l)
                        if (!cr[q2] && cr[d.delta[q2][l]]) {
                            cr[q2] = 1;
                            changed = true;
                        }
            }
            coreach.push_back(std::move(cr));
        }
        // pick a fresh-node prefix not colliding with instance node names
        while (true) {
            bool clash = false;
            for (const auto &n : s.graph.nodes())
                if (n.rfind(fresh_prefix, 0) == 0)
                    clash = true;
            if (!clash)
                break;
            fresh_prefix += "z";
        }
    }

    GraphDb materialize() const {
        std::vector<NodeId> nodes = s.graph.nodes();
        std::vector<EdgeT> edges;
        int fresh = 0;
        for (const auto &seg : segments) {
            NodeId cur = seg.src;
            for (std::size_t i = 0; i < seg.word.size(); ++i) {
                NodeId nxt;
                if (i + 1 == seg.word.size())
                    nxt = seg.dst;
                else {
                    nxt = fresh_prefix + std::to_string(fresh++);
                    nodes.push_back(nxt);
                }
                edges.push_back({cur, seg.word[i], nxt});
                cur = nxt;
            }
        }
        return GraphDb(sigma, std::move(nodes), std::move(edges));
    }

    // returns false when the current segment set is already inconsistent
    bool consistent(const GraphDb &db, const ViewInstance &img) const {
        if (exact) {
            for (const auto &e : img.graph.edges())
                if (!s.graph.has_edge(e.src, e.label, e.dst))
                    return false;
        } else if (avoid && q) {
            if (rpq_eval(db, *q).count(*avoid))
                return false;
        }
        return true;
    }

    std::vector<EdgeT> uncovered(const ViewInstance &img) const {
        std::vector<EdgeT> out;
        for (const auto &e : s.graph.edges())
            if (!img.graph.has_edge(e.src, e.label, e.dst))
                out.push_back(e);
        return out;
    }

    std::string state_key() const {
        std::string key;
        for (const auto &seg : segments) {
            key += seg.src + "|" + seg.dst + "|";
            for (const auto &l : seg.word)
                key += l + ".";
            key += ";";
        }
        return key;
    }

    // Decompositions of a target tuple into junction-to-junction segments;
    // each candidate decomposition is handed to `attempt`.
    bool enumerate_decompositions(
        int view_idx, const NodeId &from, const NodeId &to,
        const std::function<bool(const std::vector<Segment> &)> &attempt) {
        const Dfa &d = view_dfas[view_idx];
        std::vector<Segment> decomp;
        std::set<std::pair<NodeId, int>> on_path;
        int budget_now = fresh_budget - fresh_used;

        std::function<bool(const NodeId &, int, int)> rec =
            [&](const NodeId &z, int qs, int fresh_left) -> bool {
            if (++steps > max_steps) {
                budget_hit = true;
                return false;
            }
            if (z == to && d.is_final[qs] && !decomp.empty())
                if (attempt(decomp))
                    return true;
            if (!coreach[view_idx][qs])
                return false;
            // extend with one more segment: enumerate words length-then-lex
            int cap = std::min(seg_cap, fresh_left + 1);
            std::vector<std::pair<Word, int>> layer{{Word{}, qs}};
            for (int len = 1; len <= cap; ++len) {
                std::vector<std::pair<Word, int>> next;
                for (const auto &[w, st] : layer)
                    for (std::size_t li = 0; li < sigma.size(); ++li) {
                        Word w2 = w;
                        w2.push_back(sigma[li]);
                        int st2 = d.delta[st][static_cast<int>(li)];
                        next.emplace_back(std::move(w2), st2);
                    }
                for (const auto &[w, st] : next) {
                    if (!coreach[view_idx][st])
                        continue;
                    for (const auto &z2 : s.graph.nodes()) {
                        auto mark = std::make_pair(z2, st);
                        if (on_path.count(mark))
                            continue;
                        int cost = static_cast<int>(w.size()) - 1;
                        Segment seg{z, z2, w};
                        bool already = segments.count(seg) ||
                                       std::find(decomp.begin(), decomp.end(), seg) !=
                                           decomp.end();
                        int spend = already ? 0 : cost;
                        if (spend > fresh_left)
                            continue;
                        decomp.push_back(seg);
                        on_path.insert(mark);
                        if (rec(z2, st, fresh_left - spend))
                            return true;
                        on_path.erase(mark);
                        decomp.pop_back();
                        if (budget_hit)
                            return false;
                    }
                }
                layer = std::move(next);
            }
            return false;
        };
        return rec(from, d.initial, budget_now);
    }

    // main DFS over uncovered tuples
    bool search() {
        if (++steps > max_steps) {
            budget_hit = true;
            return false;
        }
        GraphDb db = materialize();
        ViewInstance img = apply_view(db, v);
        if (!consistent(db, img))
            return false;
        auto missing = uncovered(img);
        if (missing.empty())
            return true;
        std::string key = state_key();
        if (!visited.insert(key).second)
            return false;
        const EdgeT &target = missing.front();
        int view_idx =
            static_cast<int>(std::find(v.tau.begin(), v.tau.end(), target.label) -
                             v.tau.begin());
        return enumerate_decompositions(
            view_idx, target.src, target.dst, [&](const std::vector<Segment> &dec) {
                std::vector<Segment> added;
                int cost = 0;
                for (const auto &seg : dec)
                    if (!segments.count(seg)) {
                        added.push_back(seg);
                        cost += seg.fresh_cost();
                    }
                if (fresh_used + cost > fresh_budget)
                    return false;
                for (const auto &seg : added)
                    segments.insert(seg);
                fresh_used += cost;
                if (search())
                    return true;
                for (const auto &seg : added)
                    segments.erase(seg);
                fresh_used -= cost;
                return false;
            });
    }
};

} // namespace

PreimageResult find_preimage(const ViewInstance &s, const ViewSpec &v,
                             int max_nodes, const PreimageOptions &opts) {
    int base = static_cast<int>(s.graph.num_nodes());
    if (max_nodes < base)
        throw Error("find_preimage: max_nodes must be >= instance size");
    CoverSearch cs(s, v, /*exact=*/true, max_nodes - base, opts.max_segment_len,
                   opts.max_steps);
    PreimageResult out;
    out.bound = max_nodes;
    if (cs.search()) {
        GraphDb db = cs.materialize();
        // executable postcondition: the view of the result equals s exactly
        ViewInstance img = apply_view(db, v);
        if (!(img.graph == s.graph))
            throw Error("find_preimage: exactness re-check failed");
        out.status = PreimageResult::Status::Found;
        out.db = std::move(db);
        return out;
    }
    out.status = cs.budget_hit ? PreimageResult::Status::BudgetExceeded
                               : PreimageResult::Status::NotFoundWithinBound;
    return out;
}

PairSet rewrite_via_preimage(const ViewInstance &s, const QuerySpec &q,
                             const ViewSpec &v, int max_nodes,
                             const PreimageOptions &opts) {
    PreimageResult r = find_preimage(s, v, max_nodes, opts);
    if (r.status == PreimageResult::Status::BudgetExceeded)
        throw BudgetExceeded("rewrite_via_preimage: preimage search budget");
    if (r.status == PreimageResult::Status::NotFoundWithinBound)
        throw NotAViewImage("rewrite_via_preimage: no preimage within " +
                            std::to_string(max_nodes) + " nodes");
    return rpq_eval(r.db, q);
}

std::string preimage_bound_note(const ViewSpec &v, std::size_t instance_size) {
    std::vector<RegexAst> views;
    for (const auto &name : v.tau)
        views.push_back(v.definitions.at(name));
    ProductDfa prod = build_view_product(views);
    double n = prod.n_of_v;
    double log10_nn = n * std::log10(n);
    std::ostringstream out;
    out << "pumping ceiling r * |S|^2 * N(V)^N(V) with N(V) = " << prod.n_of_v
        << ", |S| = " << instance_size << ": N(V)^N(V) ~ 10^" << log10_nn
        << ", r = Ramsey number for 3-cliques in N^N * 2^(N^N) colors"
        << " (unreachable; searches use the user bound instead)";
    return out.str();
}

std::pair<ViewSpec, ViewInstance>
gen_3col(const std::vector<std::pair<std::string, std::string>> &edges) {
    std::set<std::pair<std::string, std::string>> eset;
    std::set<std::string> nodes;
    for (const auto &[a, b] : edges) {
        if (a == b)
            throw Error("gen_3col: self-loop " + a);
        if (!valid_token(a) || !valid_token(b))
            throw ParseError("gen_3col: bad node token");
        eset.emplace(std::min(a, b), std::max(a, b));
        nodes.insert(a);
        nodes.insert(b);
    }
    if (nodes.empty())
        throw NotConnected("gen_3col: empty graph");
    // connectivity
    std::map<std::string, std::set<std::string>> adj;
    for (const auto &[a, b] : eset) {
        adj[a].insert(b);
        adj[b].insert(a);
    }
    std::set<std::string> seen{*nodes.begin()};
    std::vector<std::string> work{*nodes.begin()};
    while (!work.empty()) {
        auto n = work.back();
        work.pop_back();
        for (const auto &m : adj[n])
            if (seen.insert(m).second)
                work.push_back(m);
    }
    if (seen.size() != nodes.size())
        throw NotConnected("gen_3col: graph not connected");

    const std::vector<std::string> colors{"r", "g", "b"};
    std::vector<Label> sigma;
    for (const auto &a : colors)
        for (const auto &b : colors)
            if (a != b)
                sigma.push_back(a + b);
    std::sort(sigma.begin(), sigma.end());

    std::string v1re, v2re;
    for (const auto &l : sigma) {
        if (!v1re.empty())
            v1re += " | ";
        v1re += l;
    }
    for (const auto &l1 : sigma)
        for (const auto &l2 : sigma) {
            // l1 = a1 b1, l2 = a2 b2; keep pairs with b1 != a2
            if (l1.substr(1, 1) == l2.substr(0, 1))
                continue;
            if (!v2re.empty())
                v2re += " | ";
            v2re += l1 + " " + l2;
        }

    ViewSpec vs;
    vs.sigma = sigma;
    vs.tau = {"V1", "V2"};
    vs.definitions.emplace("V1", parse_regex(v1re, sigma));
    vs.definitions.emplace("V2", parse_regex(v2re, sigma));

    std::vector<EdgeT> tuples;
    std::vector<NodeId> inodes;
    for (const auto &[a, b] : eset) {
        tuples.push_back({a, "V1", b});
        tuples.push_back({b, "V1", a});
        inodes.push_back(a);
        inodes.push_back(b);
    }
    ViewInstance inst{GraphDb(vs.tau, std::move(inodes), std::move(tuples))};
    return {std::move(vs), std::move(inst)};
}

SoundSearchResult sound_counterexample_search(const ViewInstance &s,
                                              const QuerySpec &q,
                                              const ViewSpec &v, const NodeId &u,
                                              const NodeId &v2, int max_nodes,
                                              const PreimageOptions &opts) {
    int base = static_cast<int>(s.graph.num_nodes());
    SoundSearchResult out;
    if (max_nodes < base)
        throw Error("sound search: max_nodes must be >= instance size");
    CoverSearch cs(s, v, /*exact=*/false, max_nodes - base, opts.max_segment_len,
                   opts.max_steps);
    cs.avoid = std::make_pair(u, v2);
    cs.q = &q;
    if (cs.search()) {
        GraphDb db = cs.materialize();
        ViewInstance img = apply_view(db, v);
        for (const auto &e : s.graph.edges())
            if (!img.graph.has_edge(e.src, e.label, e.dst))
                throw Error("sound search: containment re-check failed");
        if (rpq_eval(db, q).count({u, v2}))
            throw Error("sound search: avoidance re-check failed");
        out.status = SoundSearchResult::Status::Found;
        out.db = std::move(db);
        return out;
    }
    out.status = cs.budget_hit ? SoundSearchResult::Status::BudgetExceeded
                               : SoundSearchResult::Status::NotFound;
    return out;
}

} // namespace rpqview
