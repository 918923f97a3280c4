#pragma once

#include "rpqview/csp_template.hpp"
#include "rpqview/rpq.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rpqview {

/// Context-free grammar over label terminals. Symbols appearing on some
/// left-hand side are nonterminals; everything else is a terminal.
struct Cfg {
    std::vector<std::string> nonterminals;
    std::vector<Label> terminals;
    int start = 0; // index into nonterminals
    // rhs symbols: 0..|NT|-1 nonterminal, |NT|..|NT|+|T|-1 terminal
    std::vector<std::pair<int, std::vector<int>>> productions;

    bool is_terminal(int sym) const {
        return sym >= static_cast<int>(nonterminals.size());
    }
    const Label &terminal(int sym) const {
        return terminals[sym - nonterminals.size()];
    }
};

/// One production per line: `S -> a S b | eps`. The first left-hand side is
/// the start symbol; a trailing `;` per line is accepted (spec-file style).
Cfg parse_cfg(const std::string &text);
Cfg cfg_from_def(const CfgDef &def, const std::vector<Label> &sigma);

/// CYK membership over the binary normal form.
bool cfg_accepts(const Cfg &g, const Word &w);

/// Emptiness of L(g) ∩ L(d) by the generating-symbol fixpoint over the
/// triple (state, nonterminal, state) grammar; a shortest witness word is
/// extracted and re-verified (CYK membership plus a DFA run) when nonempty.
std::optional<Word> cfg_regular_nonempty(const Cfg &g, const Dfa &d);

/// DFA of L_V = { w : exists w' in L(g) with identical transition function
/// on q's minimal DFA }, built from the reachable function automaton.
Dfa regularize_view(const Cfg &g, const QuerySpec &q);

/// Certain answers for CFG views via regularization: build the RPQ view
/// made of the L_V DFAs and decide cert against its template.
PairSet cert_cfpq(const ViewInstance &s, const QuerySpec &q,
                  const std::map<std::string, Cfg> &views);

} // namespace rpqview
