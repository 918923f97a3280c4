#include "rpqview/rpq.hpp"

#include "rpqview/errors.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace rpqview {

PairSet rpq_eval(const GraphDb &db, const Dfa &q_dfa) {
    for (const auto &l : db.alphabet())
        if (std::find(q_dfa.alphabet.begin(), q_dfa.alphabet.end(), l) ==
            q_dfa.alphabet.end())
            throw AlphabetMismatch("rpq_eval: database label not in query alphabet: " + l);
    int n = static_cast<int>(db.num_nodes());
    // map db labels to dfa label indices once
    std::vector<int> lmap(db.alphabet().size());
    for (std::size_t i = 0; i < db.alphabet().size(); ++i) {
        auto it = std::lower_bound(q_dfa.alphabet.begin(), q_dfa.alphabet.end(),
                                   db.alphabet()[i]);
        lmap[i] = static_cast<int>(it - q_dfa.alphabet.begin());
    }
    PairSet out;
    for (int x = 0; x < n; ++x) {
        // BFS over (node, dfa state)
        std::vector<char> seen(n * q_dfa.num_states, 0);
        std::deque<std::pair<int, int>> work;
        auto push = [&](int node, int q) {
            if (!seen[node * q_dfa.num_states + q]) {
                seen[node * q_dfa.num_states + q] = 1;
                work.emplace_back(node, q);
            }
        };
        push(x, q_dfa.initial);
        while (!work.empty()) {
            auto [node, q] = work.front();
            work.pop_front();
            if (q_dfa.is_final[q])
                out.emplace(db.nodes()[x], db.nodes()[node]);
            for (const auto &ie : db.out_edges()[node])
                push(ie.dst, q_dfa.delta[q][lmap[ie.label]]);
        }
    }
    return out;
}

PairSet rpq_eval(const GraphDb &db, const QuerySpec &q) {
    for (const auto &l : db.alphabet())
        if (std::find(q.sigma.begin(), q.sigma.end(), l) == q.sigma.end())
            throw AlphabetMismatch("rpq_eval: database label not in sigma: " + l);
    return rpq_eval(db, to_min_dfa(q.regex));
}

ViewInstance apply_view(const GraphDb &db, const ViewSpec &v, bool keep_all_nodes) {
    if (!v.is_regular())
        throw Error("apply_view: view has context-free definitions");
    for (const auto &l : db.alphabet())
        if (std::find(v.sigma.begin(), v.sigma.end(), l) == v.sigma.end())
            throw AlphabetMismatch("apply_view: database label not in sigma: " + l);
    std::vector<EdgeT> edges;
    std::vector<NodeId> nodes;
    for (const auto &name : v.tau) {
        PairSet pairs = rpq_eval(db, QuerySpec{v.sigma, v.definitions.at(name)});
        for (const auto &[x, y] : pairs) {
            edges.push_back({x, name, y});
            nodes.push_back(x);
            nodes.push_back(y);
        }
    }
    if (keep_all_nodes)
        nodes = db.nodes();
    return ViewInstance{GraphDb(v.tau, std::move(nodes), std::move(edges))};
}

GraphDb path_of_word(const Word &w, const std::vector<Label> &alphabet) {
    std::vector<NodeId> nodes;
    std::vector<EdgeT> edges;
    for (std::size_t i = 0; i <= w.size(); ++i)
        nodes.push_back("p" + std::to_string(i));
    for (std::size_t i = 0; i < w.size(); ++i)
        edges.push_back({nodes[i], w[i], nodes[i + 1]});
    return GraphDb(alphabet, std::move(nodes), std::move(edges));
}

SimPartition sim_classes(const Word &w, const ViewSpec &v, int k) {
    int m = static_cast<int>(w.size());
    if (k < 0 || k > m)
        throw IndexOutOfRange("sim_classes: k out of range");
    GraphDb pw = path_of_word(w, v.sigma);
    // tuple sets per view, straight from the definition
    std::map<std::string, PairSet> tuples;
    for (const auto &name : v.tau)
        tuples[name] = rpq_eval(pw, QuerySpec{v.sigma, v.definitions.at(name)});
    auto node = [&](int i) { return "p" + std::to_string(i); };
    // signature of position i: which (view, r>=k) pairs it reaches
    std::map<std::vector<char>, std::set<int>> by_sig;
    for (int i = 0; i <= k; ++i) {
        std::vector<char> sig;
        for (const auto &name : v.tau)
            for (int r = k; r <= m; ++r)
                sig.push_back(tuples[name].count({node(i), node(r)}) ? 1 : 0);
        by_sig[sig].insert(i);
    }
    SimPartition part;
    part.k = k;
    std::vector<std::set<int>> classes;
    for (auto &[sig, members] : by_sig)
        classes.push_back(members);
    // order classes by smallest member for deterministic output
    std::sort(classes.begin(), classes.end(),
              [](const auto &a, const auto &b) { return *a.begin() < *b.begin(); });
    part.classes = std::move(classes);
    return part;
}

namespace {

CfgDef parse_cfg_block(std::istringstream &in, int &lineno, std::string first_line_rest);

} // namespace

SpecFile parse_spec(const std::string &text) {
    SpecFile spec;
    std::vector<Label> sigma;
    bool have_alpha = false;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::vector<std::tuple<std::string, std::string>> view_lines; // name, regex
    std::vector<std::pair<std::string, CfgDef>> cfg_views;
    std::string query_text;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok) || tok[0] == '#')
            continue;
        if (tok == "alphabet") {
            std::string l;
            while (ls >> l) {
                if (!valid_token(l))
                    throw ParseError("line " + std::to_string(lineno) +
                                     ": bad label " + l);
                sigma.push_back(l);
            }
            have_alpha = true;
        } else if (tok == "view") {
            std::string name, eq;
            if (!(ls >> name >> eq) || eq != "=")
                throw ParseError("line " + std::to_string(lineno) +
                                 ": expected: view <Name> = <regex>");
            std::string rest;
            std::getline(ls, rest);
            view_lines.emplace_back(name, rest);
        } else if (tok == "query") {
            std::string name, eq;
            if (!(ls >> name >> eq) || eq != "=")
                throw ParseError("line " + std::to_string(lineno) +
                                 ": expected: query <Name> = <regex>");
            std::string rest;
            std::getline(ls, rest);
            query_text = rest;
            spec.has_query = true;
        } else if (tok == "cfgview") {
            std::string name;
            if (!(ls >> name) || !valid_token(name))
                throw ParseError("line " + std::to_string(lineno) +
                                 ": expected: cfgview <Name> { ... }");
            std::string rest;
            std::getline(ls, rest);
            cfg_views.emplace_back(name, parse_cfg_block(in, lineno, rest));
        } else {
            throw ParseError("line " + std::to_string(lineno) +
                             ": unknown directive " + tok);
        }
    }
    if (!have_alpha)
        throw ParseError("spec file: missing alphabet line");
    std::sort(sigma.begin(), sigma.end());
    sigma.erase(std::unique(sigma.begin(), sigma.end()), sigma.end());
    spec.view.sigma = sigma;
    for (auto &[name, re] : view_lines) {
        spec.view.tau.push_back(name);
        spec.view.definitions.emplace(name, parse_regex(re, sigma));
    }
    for (auto &[name, def] : cfg_views) {
        spec.view.tau.push_back(name);
        spec.view.cfg_definitions.emplace(name, def);
    }
    if (spec.has_query) {
        spec.query.sigma = sigma;
        spec.query.regex = parse_regex(query_text, sigma);
    }
    std::set<std::string> names(spec.view.tau.begin(), spec.view.tau.end());
    if (names.size() != spec.view.tau.size())
        throw ParseError("spec file: duplicate view names");
    return spec;
}

namespace {

// Body: `<NT> -> <sym> ... | ... ;` entries until the closing '}'.
CfgDef parse_cfg_block(std::istringstream &in, int &lineno,
                       std::string first_line_rest) {
    std::string body = first_line_rest;
    auto brace_open = body.find('{');
    if (brace_open == std::string::npos)
        throw ParseError("line " + std::to_string(lineno) + ": cfgview expects '{'");
    body = body.substr(brace_open + 1);
    while (body.find('}') == std::string::npos) {
        std::string line;
        if (!std::getline(in, line))
            throw ParseError("cfgview: missing closing '}'");
        ++lineno;
        body += "\n" + line;
    }
    body = body.substr(0, body.find('}'));

    CfgDef def;
    std::istringstream bs(body);
    std::string entry;
    while (std::getline(bs, entry, ';')) {
        std::istringstream es(entry);
        std::string nt, arrow;
        if (!(es >> nt))
            continue; // empty entry (trailing ';')
        if (!(es >> arrow) || arrow != "->")
            throw ParseError("cfgview: expected '<NT> -> ...' in: " + entry);
        if (def.start.empty())
            def.start = nt;
        std::vector<std::string> rhs;
        std::string sym;
        auto flush = [&]() {
            def.productions.emplace_back(nt, rhs);
            rhs.clear();
        };
        while (es >> sym) {
            if (sym == "|")
                flush();
            else if (sym == "eps")
                ; // empty production body
            else if (valid_token(sym))
                rhs.push_back(sym);
            else
                throw ParseError("cfgview: bad symbol " + sym);
        }
        flush();
    }
    if (def.start.empty())
        throw ParseError("cfgview: no productions");
    return def;
}

} // namespace

std::string serialize_spec(const SpecFile &spec) {
    std::ostringstream out;
    out << "alphabet";
    for (const auto &l : spec.view.sigma)
        out << ' ' << l;
    out << '\n';
    for (const auto &name : spec.view.tau) {
        auto it = spec.view.definitions.find(name);
        if (it != spec.view.definitions.end()) {
            out << "view " << name << " = " << regex_to_string(it->second) << '\n';
        } else {
            const auto &def = spec.view.cfg_definitions.at(name);
            out << "cfgview " << name << " {";
            for (const auto &[nt, rhs] : def.productions) {
                out << ' ' << nt << " ->";
                if (rhs.empty())
                    out << " eps";
                for (const auto &s : rhs)
                    out << ' ' << s;
                out << " ;";
            }
            out << " }\n";
        }
    }
    if (spec.has_query)
        out << "query Q = " << regex_to_string(spec.query.regex) << '\n';
    return out.str();
}

} // namespace rpqview
