#pragma once

#include "rpqview/graph.hpp"

#include <memory>
#include <string>
#include <vector>

namespace rpqview {

/// Regular expression tree over a label alphabet. Symbols are whole
/// label tokens (multi-character labels are one symbol each); `eps`
/// is the reserved epsilon token.
struct RegexNode;
using RegexPtr = std::shared_ptr<const RegexNode>;

struct RegexNode {
    enum class Kind { Epsilon, Symbol, Concat, Alt, Star, Plus, Opt };
    Kind kind;
    int symbol = -1; // index into the alphabet, for Kind::Symbol
    std::vector<RegexPtr> children;
};

struct RegexAst {
    std::vector<Label> alphabet; // sorted
    RegexPtr root;
};

RegexPtr re_epsilon();
RegexPtr re_symbol(int idx);
RegexPtr re_concat(std::vector<RegexPtr> parts);
RegexPtr re_alt(std::vector<RegexPtr> parts);
RegexPtr re_star(RegexPtr c);
RegexPtr re_plus(RegexPtr c);
RegexPtr re_opt(RegexPtr c);

/// Grammar: alt := cat ('|' cat)*; cat := post+; post := atom ('*'|'+'|'?')*;
/// atom := SYMBOL | 'eps' | '(' alt ')'. Tokens are whitespace separated
/// except that postfix operators and parens may abut a token.
RegexAst parse_regex(const std::string &text, const std::vector<Label> &alphabet);

std::string regex_to_string(const RegexAst &ast);

/// Direct AST matcher (used as a test oracle next to NFA/DFA membership).
bool regex_matches(const RegexAst &ast, const Word &w);

} // namespace rpqview
