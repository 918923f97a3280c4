#pragma once

#include "rpqview/regex.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

namespace rpqview {

/// Thompson-construction NFA with epsilon moves (label -1).
struct Nfa {
    std::vector<Label> alphabet;
    int num_states = 0;
    int initial = 0;
    std::set<int> finals;
    // (state, label index or -1 for epsilon, state)
    std::vector<std::tuple<int, int, int>> transitions;
};

/// Complete DFA: delta is total (an explicit dead state is permitted).
/// Minimal DFAs produced here are canonically numbered by BFS from the
/// initial state with label-sorted edge order, so equal languages give
/// identical serialized automata.
struct Dfa {
    std::vector<Label> alphabet;
    int num_states = 0;
    int initial = 0;
    std::vector<char> is_final;            // size num_states
    std::vector<std::vector<int>> delta;   // [state][label] -> state

    int step(int q, int label) const { return delta[q][label]; }
    bool accepts(const Word &w) const;
    int run(int q, const Word &w) const;
};

/// Total function on the states of a Dfa or ProductDfa.
using TransitionFn = std::vector<int>;

/// Reachable product of the minimal DFAs of all view expressions; carries
/// per-view acceptance sets and N(V) = number of reachable product states.
struct ProductDfa {
    std::vector<Label> alphabet;
    std::vector<Dfa> component_dfas;
    int num_states = 0;
    int initial = 0;
    std::vector<std::vector<int>> delta;        // [state][label]
    std::vector<std::vector<int>> state_tuples; // component states per state
    std::vector<std::set<int>> per_view_finals; // product states final for view i
    int n_of_v = 0;

    int step(int q, int label) const { return delta[q][label]; }
    int run(int q, const Word &w) const;
};

Nfa thompson_nfa(const RegexAst &ast);
bool nfa_accepts(const Nfa &nfa, const Word &w);

/// Subset construction + minimization + completion + canonical numbering.
Dfa to_min_dfa(const RegexAst &ast);
Dfa minimize_dfa(const Dfa &dfa);

std::string dump_automaton(const Dfa &dfa);

ProductDfa build_view_product(const std::vector<RegexAst> &views);

TransitionFn word_transition(const Dfa &dfa, const Word &w);
TransitionFn word_transition(const ProductDfa &prod, const Word &w);

std::set<int> lifted_set_transition(const Dfa &dfa, const std::set<int> &d,
                                    const Word &w);

/// All words of L(ast) with length <= max_len, in length-then-lex order.
std::vector<Word> enumerate_words(const RegexAst &ast, int max_len);
std::vector<Word> enumerate_words(const Dfa &dfa, int max_len);

/// Shortest word in L(d1) ∩ L(d2) (BFS, lexicographic tie-break), if any.
std::optional<Word> nonempty_intersection(const Dfa &d1, const Dfa &d2);

/// Shortest accepted word of a DFA, if the language is nonempty.
std::optional<Word> shortest_word(const Dfa &dfa);

} // namespace rpqview
