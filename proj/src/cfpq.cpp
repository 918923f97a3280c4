#include "rpqview/cfpq.hpp"

#include "rpqview/errors.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <sstream>

namespace rpqview {

namespace {

Cfg build_cfg(const std::vector<std::pair<std::string, std::vector<std::string>>>
                  &raw_productions,
              const std::string &start,
              const std::optional<std::vector<Label>> &sigma) {
    Cfg g;
    std::set<std::string> lhs;
    for (const auto &[nt, rhs] : raw_productions)
        lhs.insert(nt);
    g.nonterminals.assign(lhs.begin(), lhs.end());
    auto nt_index = [&](const std::string &s) {
        auto it = std::lower_bound(g.nonterminals.begin(), g.nonterminals.end(), s);
        if (it == g.nonterminals.end() || *it != s)
            return -1;
        return static_cast<int>(it - g.nonterminals.begin());
    };
    std::set<std::string> terms;
    for (const auto &[nt, rhs] : raw_productions)
        for (const auto &sym : rhs)
            if (nt_index(sym) < 0) {
                if (sigma && std::find(sigma->begin(), sigma->end(), sym) ==
                                 sigma->end())
                    throw UndeclaredSymbol("cfg: terminal not in alphabet: " + sym);
                terms.insert(sym);
            }
    g.terminals.assign(terms.begin(), terms.end());
    auto sym_index = [&](const std::string &s) {
        int nt = nt_index(s);
        if (nt >= 0)
            return nt;
        auto it = std::lower_bound(g.terminals.begin(), g.terminals.end(), s);
        return static_cast<int>(g.nonterminals.size() + (it - g.terminals.begin()));
    };
    for (const auto &[nt, rhs] : raw_productions) {
        std::vector<int> syms;
        for (const auto &s : rhs)
            syms.push_back(sym_index(s));
        g.productions.emplace_back(nt_index(nt), std::move(syms));
    }
    g.start = nt_index(start);
    if (g.start < 0)
        throw ParseError("cfg: start symbol has no productions: " + start);
    return g;
}

} // namespace

Cfg parse_cfg(const std::string &text) {
    std::vector<std::pair<std::string, std::vector<std::string>>> raw;
    std::string start;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        // tolerate spec-file style semicolons
        std::replace(line.begin(), line.end(), ';', ' ');
        std::istringstream ls(line);
        std::string nt, arrow;
        if (!(ls >> nt) || nt[0] == '#')
            continue;
        if (!(ls >> arrow) || arrow != "->")
            throw ParseError("cfg: expected '<NT> -> ...' in: " + line);
        if (start.empty())
            start = nt;
        std::vector<std::string> rhs;
        std::string sym;
        bool flushed = false;
        auto flush = [&]() {
            raw.emplace_back(nt, rhs);
            rhs.clear();
            flushed = true;
        };
        while (ls >> sym) {
            if (sym == "|")
                flush();
            else if (sym == "eps")
                ;
            else if (valid_token(sym))
                rhs.push_back(sym);
            else
                throw ParseError("cfg: bad symbol: " + sym);
        }
        flush();
        (void)flushed;
    }
    if (raw.empty())
        throw ParseError("cfg: no productions");
    return build_cfg(raw, start, std::nullopt);
}

Cfg cfg_from_def(const CfgDef &def, const std::vector<Label> &sigma) {
    return build_cfg(def.productions, def.start, sigma);
}

namespace {

// Binary normal form: nonterminals only on rhs of length 2, terminal rules
// A -> a, plus a nullability flag for the start symbol. Unit productions and
// nullable symbols are eliminated.
struct Bnf {
    int num_nt = 0;
    int start = 0;
    bool start_nullable = false;
    std::vector<Label> terminals;
    std::vector<std::pair<int, int>> term_rules;            // (A, terminal idx)
    std::vector<std::tuple<int, int, int>> binary_rules;    // A -> B C
};

Bnf to_bnf(const Cfg &g) {
    // terminals are lifted to TBASE+i so fresh nonterminal ids never collide
    const int TBASE = 1 << 20;
    int nt_count = static_cast<int>(g.nonterminals.size());
    int next_nt = nt_count;
    std::vector<std::pair<int, std::vector<int>>> prods;
    for (const auto &[lhs, rhs] : g.productions) {
        std::vector<int> out;
        for (int sym : rhs)
            out.push_back(g.is_terminal(sym) ? TBASE + (sym - nt_count) : sym);
        prods.emplace_back(lhs, std::move(out));
    }

    // TERM: replace terminals in long rhs with fresh nonterminals
    std::map<int, int> term_nt;
    std::vector<std::pair<int, std::vector<int>>> step1;
    for (auto &[lhs, rhs] : prods) {
        if (rhs.size() <= 1) {
            step1.emplace_back(lhs, rhs);
            continue;
        }
        std::vector<int> out;
        for (int sym : rhs) {
            if (sym >= TBASE) {
                auto it = term_nt.find(sym);
                int f;
                if (it == term_nt.end()) {
                    f = next_nt++;
                    term_nt.emplace(sym, f);
                } else
                    f = it->second;
                out.push_back(f);
            } else
                out.push_back(sym);
        }
        step1.emplace_back(lhs, std::move(out));
    }
    for (const auto &[sym, fresh] : term_nt)
        step1.emplace_back(fresh, std::vector<int>{sym});

    // BIN: split long rhs
    std::vector<std::pair<int, std::vector<int>>> step2;
    for (auto &[lhs, rhs] : step1) {
        if (rhs.size() <= 2) {
            step2.emplace_back(lhs, rhs);
            continue;
        }
        int cur = lhs;
        for (std::size_t i = 0; i + 2 < rhs.size(); ++i) {
            int fresh = next_nt++;
            step2.emplace_back(cur, std::vector<int>{rhs[i], fresh});
            cur = fresh;
        }
        step2.emplace_back(cur,
                           std::vector<int>{rhs[rhs.size() - 2], rhs.back()});
    }

    // NULLABLE
    std::set<int> nullable;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto &[lhs, rhs] : step2) {
            if (nullable.count(lhs))
                continue;
            bool all = true;
            for (int sym : rhs)
                if (sym >= TBASE || !nullable.count(sym)) {
                    all = false;
                    break;
                }
            if (all) {
                nullable.insert(lhs);
                changed = true;
            }
        }
    }

    // DEL: drop nullable occurrences from binary rules
    std::set<std::pair<int, std::vector<int>>> step3;
    for (const auto &[lhs, rhs] : step2) {
        if (rhs.empty())
            continue;
        step3.emplace(lhs, rhs);
        if (rhs.size() == 2) {
            if (rhs[0] < TBASE && nullable.count(rhs[0]))
                step3.emplace(lhs, std::vector<int>{rhs[1]});
            if (rhs[1] < TBASE && nullable.count(rhs[1]))
                step3.emplace(lhs, std::vector<int>{rhs[0]});
        }
    }

    // UNIT: close A -> B chains
    std::set<std::pair<int, int>> unit;
    for (int a = 0; a < next_nt; ++a)
        unit.emplace(a, a);
    changed = true;
    while (changed) {
        changed = false;
        for (const auto &[lhs, rhs] : step3)
            if (rhs.size() == 1 && rhs[0] < TBASE)
                for (int a = 0; a < next_nt; ++a)
                    if (unit.count({a, lhs}) && !unit.count({a, rhs[0]})) {
                        unit.emplace(a, rhs[0]);
                        changed = true;
                    }
    }

    Bnf b;
    b.num_nt = next_nt;
    b.start = g.start;
    b.start_nullable = nullable.count(g.start) > 0;
    b.terminals = g.terminals;
    std::set<std::pair<int, int>> tr;
    std::set<std::tuple<int, int, int>> br;
    for (const auto &[lhs, rhs] : step3) {
        if (rhs.size() == 1 && rhs[0] >= TBASE) {
            for (int a = 0; a < next_nt; ++a)
                if (unit.count({a, lhs}))
                    tr.emplace(a, rhs[0] - TBASE);
        } else if (rhs.size() == 2) {
            for (int a = 0; a < next_nt; ++a)
                if (unit.count({a, lhs}))
                    br.emplace(a, rhs[0], rhs[1]);
        }
    }
    b.term_rules.assign(tr.begin(), tr.end());
    b.binary_rules.assign(br.begin(), br.end());
    return b;
}

} // namespace

bool cfg_accepts(const Cfg &g, const Word &w) {
    Bnf b = to_bnf(g);
    int n = static_cast<int>(w.size());
    if (n == 0)
        return b.start_nullable;
    std::vector<int> sym(n, -1);
    for (int i = 0; i < n; ++i) {
        auto it = std::lower_bound(b.terminals.begin(), b.terminals.end(), w[i]);
        if (it == b.terminals.end() || *it != w[i])
            return false;
        sym[i] = static_cast<int>(it - b.terminals.begin());
    }
    // cyk[i][len][A]
    std::vector<std::vector<std::vector<char>>> tab(
        n, std::vector<std::vector<char>>(n + 1, std::vector<char>(b.num_nt, 0)));
    for (int i = 0; i < n; ++i)
        for (const auto &[a, t] : b.term_rules)
            if (t == sym[i])
                tab[i][1][a] = 1;
    for (int len = 2; len <= n; ++len)
        for (int i = 0; i + len <= n; ++i)
            for (const auto &[a, x, y] : b.binary_rules)
                for (int split = 1; split < len; ++split)
                    if (tab[i][split][x] && tab[i + split][len - split][y]) {
                        tab[i][len][a] = 1;
                        break;
                    }
    return tab[0][n][b.start] != 0;
}

std::optional<Word> cfg_regular_nonempty(const Cfg &g, const Dfa &d) {
    for (const auto &t : g.terminals)
        if (std::find(d.alphabet.begin(), d.alphabet.end(), t) == d.alphabet.end())
            throw AlphabetMismatch("cfg_regular_nonempty: terminal not in DFA alphabet: " + t);
    Bnf b = to_bnf(g);
    if (b.start_nullable && d.is_final[d.initial])
        return Word{};

    int ns = d.num_states;
    auto idx = [&](int p, int a, int q) { return (p * b.num_nt + a) * ns + q; };
    const long long INF = 1ll << 60;
    std::vector<long long> len(static_cast<std::size_t>(ns) * b.num_nt * ns, INF);
    struct Parent {
        int kind = -1; // 0 term, 1 binary
        int tsym = -1;
        int x = -1, y = -1, mid = -1;
    };
    std::vector<Parent> par(len.size());

    // label index in d per grammar terminal
    std::vector<int> lmap(b.terminals.size());
    for (std::size_t i = 0; i < b.terminals.size(); ++i) {
        auto it =
            std::lower_bound(d.alphabet.begin(), d.alphabet.end(), b.terminals[i]);
        lmap[i] = static_cast<int>(it - d.alphabet.begin());
    }

    for (const auto &[a, t] : b.term_rules)
        for (int p = 0; p < ns; ++p) {
            int q = d.delta[p][lmap[t]];
            auto &slot = len[idx(p, a, q)];
            if (slot > 1) {
                slot = 1;
                par[idx(p, a, q)] = Parent{0, t, -1, -1, -1};
            }
        }
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto &[a, x, y] : b.binary_rules)
            for (int p = 0; p < ns; ++p)
                for (int m = 0; m < ns; ++m) {
                    long long lx = len[idx(p, x, m)];
                    if (lx >= INF)
                        continue;
                    for (int q = 0; q < ns; ++q) {
                        long long ly = len[idx(m, y, q)];
                        if (ly >= INF)
                            continue;
                        auto &slot = len[idx(p, a, q)];
                        if (lx + ly < slot) {
                            slot = lx + ly;
                            par[idx(p, a, q)] = Parent{1, -1, x, y, m};
                            changed = true;
                        }
                    }
                }
    }

    long long best = INF;
    int best_q = -1;
    for (int q = 0; q < ns; ++q)
        if (d.is_final[q] && len[idx(d.initial, b.start, q)] < best) {
            best = len[idx(d.initial, b.start, q)];
            best_q = q;
        }
    if (best_q < 0)
        return std::nullopt;

    std::function<void(int, int, int, Word &)> extract = [&](int p, int a, int q,
                                                             Word &w) {
        const Parent &pr = par[idx(p, a, q)];
        if (pr.kind == 0) {
            w.push_back(b.terminals[pr.tsym]);
        } else {
            extract(p, pr.x, pr.mid, w);
            extract(pr.mid, pr.y, q, w);
        }
    };
    Word w;
    extract(d.initial, b.start, best_q, w);
    // executed verification of the witness
    if (!cfg_accepts(g, w))
        throw Error("cfg_regular_nonempty: witness fails CYK membership");
    if (!d.accepts(w))
        throw Error("cfg_regular_nonempty: witness fails the DFA");
    return w;
}

namespace {

// Deterministic automaton whose states are the transition functions of the
// query DFA reachable from the identity.
struct FunctionAutomaton {
    std::vector<TransitionFn> states;
    std::map<TransitionFn, int> ids;
    std::vector<std::vector<int>> delta;
    int initial = 0;

    FunctionAutomaton(const Dfa &qd) {
        int la = static_cast<int>(qd.alphabet.size());
        TransitionFn id(qd.num_states);
        for (int i = 0; i < qd.num_states; ++i)
            id[i] = i;
        states.push_back(id);
        ids.emplace(id, 0);
        std::queue<int> work;
        work.push(0);
        while (!work.empty()) {
            int s = work.front();
            work.pop();
            if (static_cast<int>(delta.size()) <= s)
                delta.resize(s + 1, std::vector<int>(la, -1));
            for (int l = 0; l < la; ++l) {
                TransitionFn next(qd.num_states);
                for (int i = 0; i < qd.num_states; ++i)
                    next[i] = qd.delta[states[s][i]][l];
                auto it = ids.find(next);
                int t;
                if (it == ids.end()) {
                    t = static_cast<int>(states.size());
                    states.push_back(next);
                    ids.emplace(next, t);
                    work.push(t);
                } else
                    t = it->second;
                delta[s][l] = t;
            }
        }
        delta.resize(states.size(),
                     std::vector<int>(qd.alphabet.size(), 0));
    }

    Dfa to_dfa(const std::vector<Label> &alphabet,
               const std::set<int> &finals) const {
        Dfa d;
        d.alphabet = alphabet;
        d.num_states = static_cast<int>(states.size());
        d.initial = initial;
        d.delta = delta;
        d.is_final.assign(d.num_states, 0);
        for (int f : finals)
            d.is_final[f] = 1;
        return d;
    }
};

} // namespace

Dfa regularize_view(const Cfg &g, const QuerySpec &q) {
    for (const auto &t : g.terminals)
        if (std::find(q.sigma.begin(), q.sigma.end(), t) == q.sigma.end())
            throw UndeclaredSymbol("regularize_view: terminal not in sigma: " + t);
    Dfa qd = to_min_dfa(q.regex);
    std::vector<Label> sigma = q.sigma;
    std::sort(sigma.begin(), sigma.end());
    // the function automaton must read the full sigma so L_V is over sigma
    Dfa qd_full = qd;
    if (qd.alphabet != sigma)
        throw AlphabetMismatch("regularize_view: query alphabet mismatch");
    FunctionAutomaton fa(qd_full);

    // f is good iff L(g) ∩ L_f nonempty; all f at once via one emptiness
    // fixpoint per final-state choice is wasteful, so test each reachable f
    // against the function automaton with that single final state.
    std::set<int> good;
    for (int f = 0; f < static_cast<int>(fa.states.size()); ++f) {
        Dfa lf = fa.to_dfa(sigma, {f});
        if (cfg_regular_nonempty(g, lf))
            good.insert(f);
    }
    return minimize_dfa(fa.to_dfa(sigma, good));
}

PairSet cert_cfpq(const ViewInstance &s, const QuerySpec &q,
                  const std::map<std::string, Cfg> &views) {
    std::vector<std::string> tau;
    std::vector<Dfa> dfas;
    for (const auto &name : s.graph.alphabet()) {
        auto it = views.find(name);
        if (it == views.end())
            throw UnknownLabel("cert_cfpq: no grammar for view " + name);
        tau.push_back(name);
        dfas.push_back(minimize_dfa(regularize_view(it->second, q)));
    }
    std::vector<Label> sigma = q.sigma;
    std::sort(sigma.begin(), sigma.end());
    Template t = build_template_from_dfas(to_min_dfa(q.regex), tau, dfas, sigma);
    return cert_all(s, t);
}

} // namespace rpqview
