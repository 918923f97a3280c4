#include "rpqview/datalog.hpp"

#include "rpqview/errors.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace rpqview {

int DatalogProgram::max_idb_arity() const {
    int m = 0;
    for (const auto &[name, ar] : idb)
        m = std::max(m, ar);
    return m;
}

int DatalogProgram::max_rule_vars() const {
    int m = 0;
    for (const auto &r : rules) {
        std::set<std::string> vars(r.head.vars.begin(), r.head.vars.end());
        for (const auto &a : r.body)
            vars.insert(a.vars.begin(), a.vars.end());
        m = std::max(m, static_cast<int>(vars.size()));
    }
    return m;
}

namespace {

using Mask = uint64_t; // subset of template nodes (m <= 64)

struct Emitter {
    const Template &t;
    int m;                               // template nodes
    int nl;                              // tau labels
    std::vector<std::vector<Mask>> fwd;  // [label][a] -> successors mask
    std::vector<std::vector<Mask>> bwd;  // [label][b] -> predecessors mask
    std::vector<Mask> loop;              // [label] -> nodes with self loop
    Mask full, src, tgt;

    explicit Emitter(const Template &tt) : t(tt) {
        m = static_cast<int>(t.graph.num_nodes());
        if (m > 62)
            throw EmissionTooLarge("emit_datalog: template too large (" +
                                   std::to_string(m) + " nodes); core it first");
        nl = static_cast<int>(t.graph.alphabet().size());
        fwd.assign(nl, std::vector<Mask>(m, 0));
        bwd.assign(nl, std::vector<Mask>(m, 0));
        loop.assign(nl, 0);
        for (const auto &ie : t.graph.iedges()) {
            fwd[ie.label][ie.src] |= 1ull << ie.dst;
            bwd[ie.label][ie.dst] |= 1ull << ie.src;
            if (ie.src == ie.dst)
                loop[ie.label] |= 1ull << ie.src;
        }
        full = m == 64 ? ~0ull : (1ull << m) - 1;
        src = tgt = 0;
        for (int i = 0; i < m; ++i) {
            if (t.sources.count(t.graph.nodes()[i]))
                src |= 1ull << i;
            if (t.targets.count(t.graph.nodes()[i]))
                tgt |= 1ull << i;
        }
    }

    // pattern between an old variable a and a new variable b: bit 2*i set
    // means label i forward (a -> b), bit 2*i+1 means backward (b -> a)
    Mask prop(Mask h, unsigned pattern) const {
        Mask out = 0;
        for (int a = 0; a < m; ++a) {
            if (!(h & (1ull << a)))
                continue;
            Mask images = full;
            for (int i = 0; i < nl && images; ++i) {
                if (pattern & (1u << (2 * i)))
                    images &= fwd[i][a];
                if (pattern & (1u << (2 * i + 1)))
                    images &= bwd[i][a];
            }
            out |= images;
        }
        return out;
    }

    Mask loop_filter(Mask h, int label) const { return h & loop[label]; }
};

std::string pred_name(int idx) { return "p" + std::to_string(idx); }

} // namespace

DatalogProgram emit_datalog(const Template &t, const GameConfig &cfg,
                            std::size_t max_predicates, std::size_t max_rules) {
    const int emission_cap = 2;
    if (cfg.l > emission_cap)
        throw EmissionTooLarge("emit_datalog: l > emission cap (" +
                               std::to_string(emission_cap) + ")");
    if (cfg.l != 1 || cfg.k != 2)
        throw EmissionTooLarge(
            "emit_datalog: only the (1,2) program is emitted; the (2,3) "
            "predicate space (sets of template-node pairs crossed with "
            "3-variable patterns) exceeds any practical budget here");

    Emitter em(t);
    int npat = 1 << (2 * em.nl); // patterns between two instance variables
    if (static_cast<std::size_t>(npat) > max_rules)
        throw EmissionTooLarge("emit_datalog: pattern space too large");

    // close {full, src, tgt} under loop filters, pattern propagation and
    // pairwise intersection; this is the reachable predicate family
    std::vector<Mask> family{em.full, em.src, em.tgt};
    std::map<Mask, int> fidx{{em.full, 0}, {em.src, 1}, {em.tgt, 2}};
    auto intern = [&](Mask h) {
        auto it = fidx.find(h);
        if (it != fidx.end())
            return it->second;
        int id = static_cast<int>(family.size());
        family.push_back(h);
        fidx.emplace(h, id);
        if (family.size() > max_predicates)
            throw EmissionTooLarge("emit_datalog: predicate budget exceeded (" +
                                   std::to_string(family.size()) + " sets)");
        return id;
    };
    for (std::size_t i = 0; i < family.size(); ++i) {
        Mask h = family[i];
        for (int l = 0; l < em.nl; ++l)
            intern(em.loop_filter(h, l));
        for (unsigned pat = 1; pat < static_cast<unsigned>(npat); ++pat)
            intern(em.prop(h, pat));
        for (std::size_t j = 0; j <= i; ++j)
            intern(family[i] & family[j]);
    }

    DatalogProgram p;
    p.edb = t.graph.alphabet();
    p.goal = "goal";
    for (std::size_t i = 0; i < family.size(); ++i)
        p.idb.emplace_back(pred_name(static_cast<int>(i)), 3);
    p.idb.emplace_back("goal", 2);

    auto atom = [](std::string pred, std::vector<std::string> vars) {
        return DatalogProgram::Atom{std::move(pred), std::move(vars)};
    };
    auto name_of = [&](Mask h) { return pred_name(fidx.at(h)); };

    // base knowledge
    p.rules.push_back({atom(name_of(em.full), {"V", "X", "Y"}),
                       {atom("node", {"V"}), atom("node", {"X"}), atom("node", {"Y"})}});
    p.rules.push_back({atom(name_of(em.src), {"X", "X", "Y"}),
                       {atom("node", {"X"}), atom("node", {"Y"})}});
    p.rules.push_back({atom(name_of(em.tgt), {"Y", "X", "Y"}),
                       {atom("node", {"X"}), atom("node", {"Y"})}});

    const auto &tau = t.graph.alphabet();
    for (std::size_t i = 0; i < family.size(); ++i) {
        Mask h = family[i];
        // self-loop filters
        for (int l = 0; l < em.nl; ++l) {
            Mask h2 = em.loop_filter(h, l);
            if (h2 == h)
                continue;
            p.rules.push_back({atom(name_of(h2), {"V", "X", "Y"}),
                               {atom(pred_name(static_cast<int>(i)), {"V", "X", "Y"}),
                                atom(tau[l], {"V", "V"})}});
        }
        // propagation through every pattern between an old and a new variable
        for (unsigned pat = 1; pat < static_cast<unsigned>(npat); ++pat) {
            Mask h2 = em.prop(h, pat);
            std::vector<DatalogProgram::Atom> body{
                atom(pred_name(static_cast<int>(i)), {"V", "X", "Y"})};
            for (int l = 0; l < em.nl; ++l) {
                if (pat & (1u << (2 * l)))
                    body.push_back(atom(tau[l], {"V", "W"}));
                if (pat & (1u << (2 * l + 1)))
                    body.push_back(atom(tau[l], {"W", "V"}));
            }
            p.rules.push_back({atom(name_of(h2), {"W", "X", "Y"}), std::move(body)});
            if (p.rules.size() > max_rules)
                throw EmissionTooLarge("emit_datalog: rule budget exceeded");
        }
        // intersections
        for (std::size_t j = 0; j < family.size(); ++j) {
            Mask h2 = h & family[j];
            if (h2 == h || h2 == family[j])
                continue;
            p.rules.push_back({atom(name_of(h2), {"V", "X", "Y"}),
                               {atom(pred_name(static_cast<int>(i)), {"V", "X", "Y"}),
                                atom(pred_name(static_cast<int>(j)), {"V", "X", "Y"})}});
            if (p.rules.size() > max_rules)
                throw EmissionTooLarge("emit_datalog: rule budget exceeded");
        }
    }
    if (fidx.count(0))
        p.rules.push_back({atom("goal", {"X", "Y"}),
                           {atom(name_of(0), {"V", "X", "Y"})}});
    return p;
}

namespace {

bool is_variable(const std::string &tok) {
    return !tok.empty() && std::isupper(static_cast<unsigned char>(tok[0]));
}

} // namespace

PairSet datalog_naive_eval(const DatalogProgram &p, const ViewInstance &s) {
    // static check: every head variable occurs in the body
    for (const auto &r : p.rules) {
        std::set<std::string> body_vars;
        for (const auto &a : r.body)
            for (const auto &v : a.vars)
                if (is_variable(v))
                    body_vars.insert(v);
        for (const auto &v : r.head.vars)
            if (is_variable(v) && !body_vars.count(v))
                throw UnboundHeadVariable("datalog: head variable " + v +
                                          " not bound in body of rule for " +
                                          r.head.pred);
    }

    using Tuple = std::vector<int>;
    std::map<std::string, std::set<Tuple>> rel;
    const auto &g = s.graph;
    for (const auto &ie : g.iedges())
        rel[g.alphabet()[ie.label]].insert({ie.src, ie.dst});
    for (int i = 0; i < static_cast<int>(g.num_nodes()); ++i)
        rel["node"].insert({i});

    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto &r : p.rules) {
            // join body atoms left to right
            std::vector<std::map<std::string, int>> bindings{{}};
            for (const auto &a : r.body) {
                std::vector<std::map<std::string, int>> next;
                const auto &tuples = rel[a.pred];
                for (const auto &b : bindings)
                    for (const auto &tup : tuples) {
                        if (tup.size() != a.vars.size())
                            continue;
                        std::map<std::string, int> nb = b;
                        bool ok = true;
                        for (std::size_t i = 0; i < a.vars.size(); ++i) {
                            auto it = nb.find(a.vars[i]);
                            if (it == nb.end())
                                nb[a.vars[i]] = tup[i];
                            else if (it->second != tup[i]) {
                                ok = false;
                                break;
                            }
                        }
                        if (ok)
                            next.push_back(std::move(nb));
                    }
                bindings = std::move(next);
                if (bindings.empty())
                    break;
            }
            for (const auto &b : bindings) {
                Tuple tup;
                for (const auto &v : r.head.vars)
                    tup.push_back(b.at(v));
                if (rel[r.head.pred].insert(tup).second)
                    changed = true;
            }
        }
    }

    PairSet out;
    for (const auto &tup : rel[p.goal])
        if (tup.size() == 2)
            out.emplace(g.nodes()[tup[0]], g.nodes()[tup[1]]);
    return out;
}

std::string serialize_datalog(const DatalogProgram &p) {
    std::ostringstream out;
    out << "# edb:";
    for (const auto &e : p.edb)
        out << ' ' << e;
    out << " node\n";
    for (const auto &r : p.rules) {
        auto write_atom = [&](const DatalogProgram::Atom &a) {
            out << a.pred << '(';
            for (std::size_t i = 0; i < a.vars.size(); ++i) {
                if (i)
                    out << ',';
                out << a.vars[i];
            }
            out << ')';
        };
        write_atom(r.head);
        out << " :- ";
        for (std::size_t i = 0; i < r.body.size(); ++i) {
            if (i)
                out << ", ";
            write_atom(r.body[i]);
        }
        out << ".\n";
    }
    out << "@goal " << p.goal << '\n';
    return out;
}

namespace {

DatalogProgram::Atom parse_atom(const std::string &text) {
    auto lp = text.find('(');
    auto rp = text.rfind(')');
    if (lp == std::string::npos || rp == std::string::npos || rp < lp)
        throw ParseError("datalog: bad atom: " + text);
    DatalogProgram::Atom a;
    a.pred = text.substr(0, lp);
    std::string args = text.substr(lp + 1, rp - lp - 1);
    std::string cur;
    for (char c : args) {
        if (c == ',') {
            if (cur.empty())
                throw ParseError("datalog: bad atom args: " + text);
            a.vars.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c)))
            cur += c;
    }
    if (!cur.empty())
        a.vars.push_back(cur);
    if (!valid_token(a.pred))
        throw ParseError("datalog: bad predicate name: " + a.pred);
    return a;
}

std::vector<std::string> split_atoms(const std::string &text) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : text) {
        if (c == '(')
            ++depth;
        if (c == ')')
            --depth;
        if (c == ',' && depth == 0) {
            out.push_back(cur);
            cur.clear();
        } else
            cur += c;
    }
    if (!cur.empty())
        out.push_back(cur);
    return out;
}

} // namespace

DatalogProgram parse_datalog(const std::string &text) {
    DatalogProgram p;
    std::istringstream in(text);
    std::string line;
    std::set<std::string> head_preds;
    std::set<std::string> body_preds;
    std::map<std::string, int> arity;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string trimmed;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c)) || !trimmed.empty())
                trimmed += c;
        while (!trimmed.empty() &&
               std::isspace(static_cast<unsigned char>(trimmed.back())))
            trimmed.pop_back();
        if (trimmed.empty() || trimmed[0] == '#')
            continue;
        if (trimmed.rfind("@goal", 0) == 0) {
            std::istringstream gs(trimmed.substr(5));
            gs >> p.goal;
            continue;
        }
        if (trimmed.back() != '.')
            throw ParseError("datalog line " + std::to_string(lineno) +
                             ": missing '.'");
        trimmed.pop_back();
        auto sep = trimmed.find(":-");
        if (sep == std::string::npos)
            throw ParseError("datalog line " + std::to_string(lineno) +
                             ": missing ':-'");
        DatalogProgram::Rule r;
        r.head = parse_atom(trimmed.substr(0, sep));
        for (const auto &atext : split_atoms(trimmed.substr(sep + 2)))
            r.body.push_back(parse_atom(atext));
        head_preds.insert(r.head.pred);
        arity[r.head.pred] = static_cast<int>(r.head.vars.size());
        for (const auto &a : r.body) {
            body_preds.insert(a.pred);
            arity[a.pred] = static_cast<int>(a.vars.size());
        }
        p.rules.push_back(std::move(r));
    }
    if (p.goal.empty())
        throw ParseError("datalog: missing @goal directive");
    for (const auto &pred : head_preds)
        p.idb.emplace_back(pred, arity[pred]);
    for (const auto &pred : body_preds)
        if (!head_preds.count(pred) && pred != "node")
            p.edb.push_back(pred);
    return p;
}

} // namespace rpqview
