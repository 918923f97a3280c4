#include "rpqview/csp_template.hpp"

#include "rpqview/errors.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace rpqview {

const Word &Template::witness(const NodeId &a, const Label &l,
                              const NodeId &b) const {
    auto it = witnesses.find({a, l, b});
    if (it == witnesses.end())
        throw UnknownLabel("template: no witness for edge " + a + " " + l + " " + b);
    return it->second;
}

std::string subset_node_name(const std::set<int> &states) {
    if (states.empty())
        return "sE";
    std::string out = "s";
    bool first = true;
    for (int q : states) {
        if (!first)
            out += "_";
        out += std::to_string(q);
        first = false;
    }
    return out;
}

std::set<int> parse_subset_node_name(const NodeId &name) {
    if (name == "sE")
        return {};
    if (name.empty() || name[0] != 's')
        throw ParseError("bad subset node name: " + name);
    std::set<int> out;
    std::string cur;
    for (std::size_t i = 1; i <= name.size(); ++i) {
        if (i == name.size() || name[i] == '_') {
            if (cur.empty())
                throw ParseError("bad subset node name: " + name);
            out.insert(std::stoi(cur));
            cur.clear();
        } else {
            cur += name[i];
        }
    }
    return out;
}

namespace {

uint64_t mask_of(const std::set<int> &s) {
    uint64_t m = 0;
    for (int q : s)
        m |= 1ull << q;
    return m;
}

std::set<int> set_of(uint64_t mask) {
    std::set<int> s;
    for (int q = 0; q < 64; ++q)
        if (mask & (1ull << q))
            s.insert(q);
    return s;
}

} // namespace

Template build_template_from_dfas(const Dfa &q_dfa,
                                  const std::vector<std::string> &tau,
                                  const std::vector<Dfa> &view_dfas,
                                  const std::vector<Label> &sigma) {
    if (q_dfa.num_states > 16)
        throw ResourceLimit("build_template: query DFA too large (" +
                            std::to_string(q_dfa.num_states) + " states)");
    int nq = q_dfa.num_states;
    int nsub = 1 << nq;
    int la = static_cast<int>(sigma.size());

    // subset automaton step per letter, as masks
    std::vector<std::vector<uint64_t>> substep(nsub, std::vector<uint64_t>(la, 0));
    for (int m = 0; m < nsub; ++m)
        for (int l = 0; l < la; ++l) {
            uint64_t r = 0;
            for (int q = 0; q < nq; ++q)
                if (m & (1 << q))
                    r |= 1ull << q_dfa.delta[q][l];
            substep[m][l] = r;
        }

    std::vector<NodeId> node_names(nsub);
    for (int m = 0; m < nsub; ++m)
        node_names[m] = subset_node_name(set_of(m));

    Template t;
    t.q_dfa = q_dfa;
    t.sigma = sigma;
    std::vector<EdgeT> edges;
    std::map<std::tuple<NodeId, Label, NodeId>, Word> witnesses;

    for (std::size_t vi = 0; vi < tau.size(); ++vi) {
        const Dfa &vd = view_dfas[vi];
        if (vd.alphabet != sigma)
            throw AlphabetMismatch("build_template: view alphabet mismatch");
        // For each start subset d1, BFS the product (subset automaton × view
        // DFA) recording the shortest word reaching each (d, view-state); the
        // accepted subsets with their shortest witnesses then induce edges
        // d1 -> d2 for every d2 ⊇ some accepted d.
        for (int d1 = 0; d1 < nsub; ++d1) {
            struct Entry {
                int prev = -1; // index into order
                int label = -1;
            };
            std::map<std::pair<uint64_t, int>, Entry> seen;
            std::vector<std::pair<uint64_t, int>> order;
            auto push = [&](uint64_t dm, int qs, int prev, int label) {
                auto key = std::make_pair(dm, qs);
                if (seen.count(key))
                    return;
                seen[key] = {prev, label};
                order.push_back(key);
            };
            push(static_cast<uint64_t>(d1), vd.initial, -1, -1);
            // accepted subset -> index in order (shortest, lex-first by BFS)
            std::map<uint64_t, int> accepted;
            for (std::size_t i = 0; i < order.size(); ++i) {
                auto [dm, qs] = order[i];
                if (vd.is_final[qs] && !accepted.count(dm))
                    accepted[dm] = static_cast<int>(i);
                for (int l = 0; l < la; ++l)
                    push(substep[dm][l], vd.delta[qs][l], static_cast<int>(i), l);
            }
            if (accepted.empty())
                continue;
            auto word_of = [&](int idx) {
                Word w;
                while (idx >= 0) {
                    auto key = order[idx];
                    const Entry &e = seen[key];
                    if (e.label >= 0)
                        w.push_back(sigma[e.label]);
                    idx = e.prev;
                }
                std::reverse(w.begin(), w.end());
                return w;
            };
            for (int d2 = 0; d2 < nsub; ++d2) {
                int best = -1;
                for (const auto &[dm, idx] : accepted) {
                    if ((dm & ~static_cast<uint64_t>(d2)) == 0)
                        if (best < 0 || idx < best)
                            best = idx;
                }
                if (best < 0)
                    continue;
                edges.push_back({node_names[d1], tau[vi], node_names[d2]});
                witnesses[{node_names[d1], tau[vi], node_names[d2]}] = word_of(best);
            }
        }
    }

    t.graph = GraphDb(tau, node_names, std::move(edges));
    t.witnesses = std::move(witnesses);
    for (int m = 0; m < nsub; ++m) {
        if (m & (1 << q_dfa.initial))
            t.sources.insert(node_names[m]);
        bool hits_final = false;
        for (int q = 0; q < nq; ++q)
            if ((m & (1 << q)) && q_dfa.is_final[q])
                hits_final = true;
        if (!hits_final)
            t.targets.insert(node_names[m]);
    }
    return t;
}

Template build_template(const QuerySpec &q, const ViewSpec &v) {
    if (q.sigma != v.sigma)
        throw AlphabetMismatch("build_template: query and view sigma differ");
    std::vector<Dfa> vds;
    for (const auto &name : v.tau)
        vds.push_back(to_min_dfa(v.definitions.at(name)));
    return build_template_from_dfas(to_min_dfa(q.regex), v.tau, vds, v.sigma);
}

namespace {

Template restrict_template(const Template &t, const std::set<NodeId> &keep) {
    Template out;
    out.graph = induced(t.graph, keep);
    for (const auto &s : t.sources)
        if (keep.count(s))
            out.sources.insert(s);
    for (const auto &s : t.targets)
        if (keep.count(s))
            out.targets.insert(s);
    for (const auto &[key, w] : t.witnesses) {
        const auto &[a, l, b] = key;
        if (keep.count(a) && keep.count(b))
            out.witnesses.emplace(key, w);
    }
    out.q_dfa = t.q_dfa;
    out.sigma = t.sigma;
    return out;
}

// One fold step: find v != u such that replacing v by u is an endomorphism
// fixing every other node, with source/target membership preserved.
bool fold_once(Template &t) {
    const GraphDb &g = t.graph;
    int n = static_cast<int>(g.num_nodes());
    for (int v = 0; v < n; ++v) {
        const NodeId &vn = g.nodes()[v];
        for (int u = 0; u < n; ++u) {
            if (u == v)
                continue;
            const NodeId &un = g.nodes()[u];
            if (t.sources.count(vn) && !t.sources.count(un))
                continue;
            if (t.targets.count(vn) && !t.targets.count(un))
                continue;
            auto img = [&](int w) { return w == v ? u : w; };
            bool ok = true;
            for (const auto &ie : g.out_edges()[v]) {
                if (!g.has_edge(un, g.alphabet()[ie.label], g.nodes()[img(ie.dst)])) {
                    ok = false;
                    break;
                }
            }
            if (ok)
                for (const auto &ie : g.in_edges()[v]) {
                    if (ie.src == v)
                        continue; // already checked as out edge
                    if (!g.has_edge(g.nodes()[ie.src], g.alphabet()[ie.label], un)) {
                        ok = false;
                        break;
                    }
                }
            if (!ok)
                continue;
            std::set<NodeId> keep(g.nodes().begin(), g.nodes().end());
            keep.erase(vn);
            t = restrict_template(t, keep);
            return true;
        }
    }
    return false;
}

} // namespace

Template template_core(const Template &t) {
    Template cur = t;
    while (fold_once(cur))
        ;
    // Greedy retract search: try to exclude each node via an endomorphism
    // that respects the source and target sets.
    bool changed = true;
    while (changed && cur.graph.num_nodes() > 1) {
        changed = false;
        for (const auto &victim : cur.graph.nodes()) {
            std::map<NodeId, std::set<NodeId>> allowed;
            std::set<NodeId> all(cur.graph.nodes().begin(), cur.graph.nodes().end());
            all.erase(victim);
            if (all.empty())
                break;
            for (const auto &n : cur.graph.nodes()) {
                std::set<NodeId> a = all;
                if (cur.sources.count(n)) {
                    std::set<NodeId> b;
                    for (const auto &x : a)
                        if (cur.sources.count(x))
                            b.insert(x);
                    a = b;
                }
                if (cur.targets.count(n)) {
                    std::set<NodeId> b;
                    for (const auto &x : a)
                        if (cur.targets.count(x))
                            b.insert(x);
                    a = b;
                }
                allowed[n] = a;
            }
            auto h = find_hom(cur.graph, cur.graph, {}, allowed);
            if (h) {
                std::set<NodeId> image;
                for (const auto &[k, v] : *h)
                    image.insert(v);
                cur = restrict_template(cur, image);
                changed = true;
                break;
            }
        }
    }
    return cur;
}

CertVerdict cert(const ViewInstance &s, const NodeId &u, const NodeId &v,
                 const Template &t) {
    if (!s.graph.has_node(u))
        throw UnknownNode("cert: unknown node " + u);
    if (!s.graph.has_node(v))
        throw UnknownNode("cert: unknown node " + v);
    std::map<NodeId, std::set<NodeId>> allowed;
    allowed[u] = t.sources;
    if (u == v) {
        std::set<NodeId> both;
        for (const auto &n : t.sources)
            if (t.targets.count(n))
                both.insert(n);
        allowed[u] = both;
    } else {
        allowed[v] = t.targets;
    }
    auto h = find_hom(s.graph, t.graph, {}, allowed);
    if (h)
        return CertVerdict{false, h};
    return CertVerdict{true, std::nullopt};
}

PairSet cert_all(const ViewInstance &s, const Template &t) {
    PairSet out;
    for (const auto &u : s.graph.nodes())
        for (const auto &v : s.graph.nodes())
            if (cert(s, u, v, t).certain)
                out.emplace(u, v);
    return out;
}

GraphDb materialize_counterexample(const ViewInstance &s, const NodeMap &h,
                                   const Template &t, const QuerySpec &q,
                                   const ViewSpec &v, const NodeId &u,
                                   const NodeId &v2) {
    std::vector<NodeId> nodes = s.graph.nodes();
    std::vector<EdgeT> edges;
    int fresh = 0;
    for (const auto &e : s.graph.edges()) {
        const Word &w = t.witness(h.at(e.src), e.label, h.at(e.dst));
        NodeId cur = e.src;
        for (std::size_t i = 0; i < w.size(); ++i) {
            NodeId nxt;
            if (i + 1 == w.size()) {
                nxt = e.dst;
            } else {
                nxt = "f" + std::to_string(fresh++);
                nodes.push_back(nxt);
            }
            edges.push_back({cur, w[i], nxt});
            cur = nxt;
        }
    }
    GraphDb out(q.sigma, std::move(nodes), std::move(edges));
    // executable certificate checks
    ViewInstance img = apply_view(out, v);
    for (const auto &e : s.graph.edges())
        if (!img.graph.has_edge(e.src, e.label, e.dst))
            throw CertificateFailure(
                "materialize_counterexample: view containment failed on " + e.src +
                " " + e.label + " " + e.dst);
    if (rpq_eval(out, q).count({u, v2}))
        throw CertificateFailure(
            "materialize_counterexample: query still holds on (" + u + "," + v2 +
            ")");
    return out;
}

std::string dump_template(const Template &t) {
    std::ostringstream out;
    out << serialize_graph(t.graph);
    for (const auto &n : t.sources)
        out << "source " << n << '\n';
    for (const auto &n : t.targets)
        out << "target " << n << '\n';
    for (const auto &[key, w] : t.witnesses) {
        const auto &[a, l, b] = key;
        out << "witness " << a << ' ' << l << ' ' << b << " =";
        for (const auto &sym : w)
            out << ' ' << sym;
        out << '\n';
    }
    return out.str();
}

Template parse_template(const std::string &text) {
    std::string graph_part, extra;
    std::istringstream in(text);
    std::string line;
    Template t;
    std::vector<std::string> graph_lines;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok))
            continue;
        if (tok == "source") {
            std::string n;
            ls >> n;
            t.sources.insert(n);
        } else if (tok == "target") {
            std::string n;
            ls >> n;
            t.targets.insert(n);
        } else if (tok == "witness") {
            std::string a, l, b, eq;
            ls >> a >> l >> b >> eq;
            Word w;
            std::string sym;
            while (ls >> sym)
                w.push_back(sym);
            t.witnesses[{a, l, b}] = w;
        } else {
            graph_lines.push_back(line);
        }
    }
    std::string g;
    for (const auto &gl : graph_lines)
        g += gl + "\n";
    t.graph = parse_graph(g);
    return t;
}

} // namespace rpqview
