#include "rpqview/automata.hpp"

#include "rpqview/errors.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <queue>

namespace rpqview {

bool Dfa::accepts(const Word &w) const { return is_final[run(initial, w)]; }

int Dfa::run(int q, const Word &w) const {
    for (const auto &l : w) {
        auto it = std::lower_bound(alphabet.begin(), alphabet.end(), l);
        if (it == alphabet.end() || *it != l)
            throw UnknownSymbol("dfa run: symbol not in alphabet: " + l);
        q = delta[q][it - alphabet.begin()];
    }
    return q;
}

int ProductDfa::run(int q, const Word &w) const {
    for (const auto &l : w) {
        auto it = std::lower_bound(alphabet.begin(), alphabet.end(), l);
        if (it == alphabet.end() || *it != l)
            throw UnknownSymbol("product run: symbol not in alphabet: " + l);
        q = delta[q][it - alphabet.begin()];
    }
    return q;
}

namespace {

struct NfaBuilder {
    Nfa nfa;
    int fresh() { return nfa.num_states++; }
    void eps(int a, int b) { nfa.transitions.emplace_back(a, -1, b); }
    void sym(int a, int l, int b) { nfa.transitions.emplace_back(a, l, b); }

    // returns (start, end) fragment
    std::pair<int, int> build(const RegexNode &n) {
        switch (n.kind) {
        case RegexNode::Kind::Epsilon: {
            int s = fresh(), e = fresh();
            eps(s, e);
            return {s, e};
        }
        case RegexNode::Kind::Symbol: {
            int s = fresh(), e = fresh();
            sym(s, n.symbol, e);
            return {s, e};
        }
        case RegexNode::Kind::Concat: {
            auto [s, e] = build(*n.children[0]);
            for (std::size_t i = 1; i < n.children.size(); ++i) {
                auto [s2, e2] = build(*n.children[i]);
                eps(e, s2);
                e = e2;
            }
            return {s, e};
        }
        case RegexNode::Kind::Alt: {
            int s = fresh(), e = fresh();
            for (const auto &c : n.children) {
                auto [cs, ce] = build(*c);
                eps(s, cs);
                eps(ce, e);
            }
            return {s, e};
        }
        case RegexNode::Kind::Star: {
            int s = fresh(), e = fresh();
            auto [cs, ce] = build(*n.children[0]);
            eps(s, cs);
            eps(ce, e);
            eps(s, e);
            eps(ce, cs);
            return {s, e};
        }
        case RegexNode::Kind::Plus: {
            int s = fresh(), e = fresh();
            auto [cs, ce] = build(*n.children[0]);
            eps(s, cs);
            eps(ce, e);
            eps(ce, cs);
            return {s, e};
        }
        case RegexNode::Kind::Opt: {
            int s = fresh(), e = fresh();
            auto [cs, ce] = build(*n.children[0]);
            eps(s, cs);
            eps(ce, e);
            eps(s, e);
            return {s, e};
        }
        }
        throw Error("unreachable");
    }
};

std::set<int> eps_closure(const Nfa &nfa, std::set<int> states) {
    std::vector<std::vector<int>> epsadj(nfa.num_states);
    for (const auto &[a, l, b] : nfa.transitions)
        if (l < 0)
            epsadj[a].push_back(b);
    std::deque<int> work(states.begin(), states.end());
    while (!work.empty()) {
        int q = work.front();
        work.pop_front();
        for (int b : epsadj[q])
            if (states.insert(b).second)
                work.push_back(b);
    }
    return states;
}

} // namespace

Nfa thompson_nfa(const RegexAst &ast) {
    NfaBuilder b;
    b.nfa.alphabet = ast.alphabet;
    auto [s, e] = b.build(*ast.root);
    b.nfa.initial = s;
    b.nfa.finals = {e};
    return std::move(b.nfa);
}

bool nfa_accepts(const Nfa &nfa, const Word &w) {
    std::set<int> cur = eps_closure(nfa, {nfa.initial});
    for (const auto &l : w) {
        auto it = std::lower_bound(nfa.alphabet.begin(), nfa.alphabet.end(), l);
        if (it == nfa.alphabet.end() || *it != l)
            return false;
        int li = static_cast<int>(it - nfa.alphabet.begin());
        std::set<int> nxt;
        for (const auto &[a, tl, b] : nfa.transitions)
            if (tl == li && cur.count(a))
                nxt.insert(b);
        cur = eps_closure(nfa, std::move(nxt));
        if (cur.empty())
            return false;
    }
    for (int q : cur)
        if (nfa.finals.count(q))
            return true;
    return false;
}

namespace {

Dfa subset_construct(const Nfa &nfa) {
    int la = static_cast<int>(nfa.alphabet.size());
    std::vector<std::vector<std::vector<int>>> adj(
        nfa.num_states, std::vector<std::vector<int>>(la));
    for (const auto &[a, l, b] : nfa.transitions)
        if (l >= 0)
            adj[a][l].push_back(b);

    Dfa dfa;
    dfa.alphabet = nfa.alphabet;
    std::map<std::set<int>, int> ids;
    std::vector<std::set<int>> sets;
    auto intern = [&](std::set<int> s) {
        auto it = ids.find(s);
        if (it != ids.end())
            return it->second;
        int id = static_cast<int>(sets.size());
        ids.emplace(s, id);
        sets.push_back(std::move(s));
        dfa.delta.emplace_back(la, -1);
        return id;
    };
    int init = intern(eps_closure(nfa, {nfa.initial}));
    dfa.initial = init;
    std::deque<int> work{init};
    std::set<int> seen{init};
    while (!work.empty()) {
        int q = work.front();
        work.pop_front();
        for (int l = 0; l < la; ++l) {
            std::set<int> nxt;
            for (int a : sets[q])
                for (int b : adj[a][l])
                    nxt.insert(b);
            int t = intern(eps_closure(nfa, std::move(nxt)));
            dfa.delta[q][l] = t;
            if (seen.insert(t).second)
                work.push_back(t);
        }
    }
    dfa.num_states = static_cast<int>(sets.size());
    dfa.is_final.assign(dfa.num_states, 0);
    for (int q = 0; q < dfa.num_states; ++q)
        for (int f : nfa.finals)
            if (sets[q].count(f))
                dfa.is_final[q] = 1;
    // delta rows for states interned late may still hold -1 (states that
    // were discovered as targets but not expanded); expand them now.
    for (int q = 0; q < dfa.num_states; ++q)
        for (int l = 0; l < la; ++l)
            if (dfa.delta[q][l] < 0) {
                std::set<int> nxt;
                for (int a : sets[q])
                    for (int b : adj[a][l])
                        nxt.insert(b);
                dfa.delta[q][l] = intern(eps_closure(nfa, std::move(nxt)));
            }
    dfa.num_states = static_cast<int>(sets.size());
    dfa.is_final.resize(dfa.num_states, 0);
    return dfa;
}

Dfa canonical_renumber(const Dfa &in) {
    // BFS from initial with label-sorted edges; unreachable states dropped.
    std::vector<int> order(in.num_states, -1);
    int next = 0;
    std::deque<int> work{in.initial};
    order[in.initial] = next++;
    while (!work.empty()) {
        int q = work.front();
        work.pop_front();
        for (int l = 0; l < static_cast<int>(in.alphabet.size()); ++l) {
            int t = in.delta[q][l];
            if (order[t] < 0) {
                order[t] = next++;
                work.push_back(t);
            }
        }
    }
    Dfa out;
    out.alphabet = in.alphabet;
    out.num_states = next;
    out.initial = order[in.initial];
    out.is_final.assign(next, 0);
    out.delta.assign(next, std::vector<int>(in.alphabet.size(), 0));
    for (int q = 0; q < in.num_states; ++q) {
        if (order[q] < 0)
            continue;
        out.is_final[order[q]] = in.is_final[q];
        for (int l = 0; l < static_cast<int>(in.alphabet.size()); ++l)
            out.delta[order[q]][l] = order[in.delta[q][l]];
    }
    return out;
}

} // namespace

Dfa minimize_dfa(const Dfa &dfa) {
    // Moore partition refinement to fixpoint, then canonical renumbering.
    int la = static_cast<int>(dfa.alphabet.size());
    std::vector<int> cls(dfa.num_states);
    for (int q = 0; q < dfa.num_states; ++q)
        cls[q] = dfa.is_final[q] ? 1 : 0;
    while (true) {
        std::map<std::vector<int>, int> sig_ids;
        std::vector<int> next_cls(dfa.num_states);
        for (int q = 0; q < dfa.num_states; ++q) {
            std::vector<int> sig{cls[q]};
            for (int l = 0; l < la; ++l)
                sig.push_back(cls[dfa.delta[q][l]]);
            auto [it, inserted] =
                sig_ids.emplace(std::move(sig), static_cast<int>(sig_ids.size()));
            next_cls[q] = it->second;
        }
        bool stable = true;
        for (int q = 0; q < dfa.num_states; ++q)
            if (next_cls[q] != cls[q])
                stable = false;
        cls = std::move(next_cls);
        if (stable)
            break;
    }
    int ncls = *std::max_element(cls.begin(), cls.end()) + 1;
    Dfa out;
    out.alphabet = dfa.alphabet;
    out.num_states = ncls;
    out.initial = cls[dfa.initial];
    out.is_final.assign(ncls, 0);
    out.delta.assign(ncls, std::vector<int>(la, 0));
    for (int q = 0; q < dfa.num_states; ++q) {
        out.is_final[cls[q]] = dfa.is_final[q];
        for (int l = 0; l < la; ++l)
            out.delta[cls[q]][l] = cls[dfa.delta[q][l]];
    }
    return canonical_renumber(out);
}

Dfa to_min_dfa(const RegexAst &ast) {
    return minimize_dfa(subset_construct(thompson_nfa(ast)));
}

std::string dump_automaton(const Dfa &dfa) {
    std::string out = "initial " + std::to_string(dfa.initial) + "\n";
    for (int q = 0; q < dfa.num_states; ++q)
        if (dfa.is_final[q])
            out += "final " + std::to_string(q) + "\n";
    for (int q = 0; q < dfa.num_states; ++q)
        for (int l = 0; l < static_cast<int>(dfa.alphabet.size()); ++l)
            out += std::to_string(q) + " " + dfa.alphabet[l] + " " +
                   std::to_string(dfa.delta[q][l]) + "\n";
    return out;
}

ProductDfa build_view_product(const std::vector<RegexAst> &views) {
    if (views.empty())
        throw EmptyViewSet("build_view_product: no views");
    ProductDfa prod;
    prod.alphabet = views[0].alphabet;
    for (const auto &v : views)
        if (v.alphabet != prod.alphabet)
            throw AlphabetMismatch("build_view_product: views disagree on alphabet");
    for (const auto &v : views)
        prod.component_dfas.push_back(to_min_dfa(v));

    int la = static_cast<int>(prod.alphabet.size());
    int nv = static_cast<int>(views.size());
    std::map<std::vector<int>, int> ids;
    auto intern = [&](std::vector<int> tuple) {
        auto it = ids.find(tuple);
        if (it != ids.end())
            return it->second;
        int id = static_cast<int>(prod.state_tuples.size());
        ids.emplace(tuple, id);
        prod.state_tuples.push_back(std::move(tuple));
        prod.delta.emplace_back(la, -1);
        return id;
    };
    std::vector<int> init(nv);
    for (int i = 0; i < nv; ++i)
        init[i] = prod.component_dfas[i].initial;
    prod.initial = intern(init);
    std::deque<int> work{prod.initial};
    while (!work.empty()) {
        int q = work.front();
        work.pop_front();
        for (int l = 0; l < la; ++l) {
            std::vector<int> nxt(nv);
            for (int i = 0; i < nv; ++i)
                nxt[i] = prod.component_dfas[i].delta[prod.state_tuples[q][i]][l];
            bool fresh = !ids.count(nxt);
            int t = intern(std::move(nxt));
            prod.delta[q][l] = t;
            if (fresh)
                work.push_back(t);
        }
    }
    prod.num_states = static_cast<int>(prod.state_tuples.size());
    prod.n_of_v = prod.num_states;
    prod.per_view_finals.assign(nv, {});
    for (int q = 0; q < prod.num_states; ++q)
        for (int i = 0; i < nv; ++i)
            if (prod.component_dfas[i].is_final[prod.state_tuples[q][i]])
                prod.per_view_finals[i].insert(q);
    return prod;
}

TransitionFn word_transition(const Dfa &dfa, const Word &w) {
    TransitionFn fn(dfa.num_states);
    for (int q = 0; q < dfa.num_states; ++q)
        fn[q] = dfa.run(q, w);
    return fn;
}

TransitionFn word_transition(const ProductDfa &prod, const Word &w) {
    TransitionFn fn(prod.num_states);
    for (int q = 0; q < prod.num_states; ++q)
        fn[q] = prod.run(q, w);
    return fn;
}

std::set<int> lifted_set_transition(const Dfa &dfa, const std::set<int> &d,
                                    const Word &w) {
    std::set<int> out;
    for (int q : d) {
        if (q < 0 || q >= dfa.num_states)
            throw UnknownState("lifted_set_transition: state out of range");
        out.insert(dfa.run(q, w));
    }
    return out;
}

std::vector<Word> enumerate_words(const Dfa &dfa, int max_len) {
    std::vector<Word> out;
    // breadth-first over word lengths; alphabet is sorted so the expansion
    // order is already lexicographic within a length
    std::vector<std::pair<Word, int>> layer{{Word{}, dfa.initial}};
    if (dfa.is_final[dfa.initial])
        out.push_back({});
    for (int len = 1; len <= max_len; ++len) {
        std::vector<std::pair<Word, int>> next;
        for (const auto &[w, q] : layer) {
            for (int l = 0; l < static_cast<int>(dfa.alphabet.size()); ++l) {
                Word w2 = w;
                w2.push_back(dfa.alphabet[l]);
                int t = dfa.delta[q][l];
                if (dfa.is_final[t])
                    out.push_back(w2);
                next.emplace_back(std::move(w2), t);
            }
        }
        layer = std::move(next);
    }
    return out;
}

std::vector<Word> enumerate_words(const RegexAst &ast, int max_len) {
    return enumerate_words(to_min_dfa(ast), max_len);
}

std::optional<Word> nonempty_intersection(const Dfa &d1, const Dfa &d2) {
    if (d1.alphabet != d2.alphabet)
        throw AlphabetMismatch("nonempty_intersection: alphabets differ");
    int la = static_cast<int>(d1.alphabet.size());
    std::map<std::pair<int, int>, std::pair<std::pair<int, int>, int>> parent;
    std::deque<std::pair<int, int>> work;
    auto start = std::make_pair(d1.initial, d2.initial);
    parent[start] = {start, -1};
    work.push_back(start);
    while (!work.empty()) {
        auto cur = work.front();
        work.pop_front();
        if (d1.is_final[cur.first] && d2.is_final[cur.second]) {
            Word w;
            auto p = cur;
            while (parent[p].second >= 0) {
                w.push_back(d1.alphabet[parent[p].second]);
                p = parent[p].first;
            }
            std::reverse(w.begin(), w.end());
            return w;
        }
        for (int l = 0; l < la; ++l) {
            auto nxt =
                std::make_pair(d1.delta[cur.first][l], d2.delta[cur.second][l]);
            if (!parent.count(nxt)) {
                parent[nxt] = {cur, l};
                work.push_back(nxt);
            }
        }
    }
    return std::nullopt;
}

std::optional<Word> shortest_word(const Dfa &dfa) {
    std::map<int, std::pair<int, int>> parent; // state -> (prev state, label)
    std::deque<int> work{dfa.initial};
    parent[dfa.initial] = {-1, -1};
    while (!work.empty()) {
        int q = work.front();
        work.pop_front();
        if (dfa.is_final[q]) {
            Word w;
            int p = q;
            while (parent[p].first >= 0 || parent[p].second >= 0) {
                w.push_back(dfa.alphabet[parent[p].second]);
                p = parent[p].first;
            }
            std::reverse(w.begin(), w.end());
            return w;
        }
        for (int l = 0; l < static_cast<int>(dfa.alphabet.size()); ++l) {
            int t = dfa.delta[q][l];
            if (!parent.count(t)) {
                parent[t] = {q, l};
                work.push_back(t);
            }
        }
    }
    return std::nullopt;
}

} // namespace rpqview
