#include "rpqview/regex.hpp"

#include "rpqview/errors.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace rpqview {

RegexPtr re_epsilon() {
    return std::make_shared<RegexNode>(RegexNode{RegexNode::Kind::Epsilon, -1, {}});
}
RegexPtr re_symbol(int idx) {
    return std::make_shared<RegexNode>(RegexNode{RegexNode::Kind::Symbol, idx, {}});
}
RegexPtr re_concat(std::vector<RegexPtr> parts) {
    if (parts.size() == 1)
        return parts[0];
    return std::make_shared<RegexNode>(
        RegexNode{RegexNode::Kind::Concat, -1, std::move(parts)});
}
RegexPtr re_alt(std::vector<RegexPtr> parts) {
    if (parts.size() == 1)
        return parts[0];
    return std::make_shared<RegexNode>(
        RegexNode{RegexNode::Kind::Alt, -1, std::move(parts)});
}
RegexPtr re_star(RegexPtr c) {
    return std::make_shared<RegexNode>(
        RegexNode{RegexNode::Kind::Star, -1, {std::move(c)}});
}
RegexPtr re_plus(RegexPtr c) {
    return std::make_shared<RegexNode>(
        RegexNode{RegexNode::Kind::Plus, -1, {std::move(c)}});
}
RegexPtr re_opt(RegexPtr c) {
    return std::make_shared<RegexNode>(
        RegexNode{RegexNode::Kind::Opt, -1, {std::move(c)}});
}

namespace {

struct Token {
    enum class Kind { Symbol, Eps, Star, Plus, Opt, Alt, LParen, RParen, End };
    Kind kind;
    std::string text;
};

std::vector<Token> tokenize(const std::string &text) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        switch (c) {
        case '*': out.push_back({Token::Kind::Star, "*"}); ++i; continue;
        case '+': out.push_back({Token::Kind::Plus, "+"}); ++i; continue;
        case '?': out.push_back({Token::Kind::Opt, "?"}); ++i; continue;
        case '|': out.push_back({Token::Kind::Alt, "|"}); ++i; continue;
        case '(': out.push_back({Token::Kind::LParen, "("}); ++i; continue;
        case ')': out.push_back({Token::Kind::RParen, ")"}); ++i; continue;
        default: break;
        }
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) ||
                    text[j] == '_'))
                ++j;
            std::string tok = text.substr(i, j - i);
            if (tok == "eps")
                out.push_back({Token::Kind::Eps, tok});
            else
                out.push_back({Token::Kind::Symbol, tok});
            i = j;
            continue;
        }
        throw ParseError(std::string("regex: unexpected character '") + c + "'");
    }
    out.push_back({Token::Kind::End, ""});
    return out;
}

struct Parser {
    const std::vector<Token> &toks;
    const std::vector<Label> &alphabet;
    std::size_t pos = 0;

    const Token &peek() const { return toks[pos]; }
    Token next() { return toks[pos++]; }

    RegexPtr parse_alt() {
        std::vector<RegexPtr> parts{parse_cat()};
        while (peek().kind == Token::Kind::Alt) {
            next();
            parts.push_back(parse_cat());
        }
        return re_alt(std::move(parts));
    }

    RegexPtr parse_cat() {
        std::vector<RegexPtr> parts;
        while (true) {
            auto k = peek().kind;
            if (k == Token::Kind::Symbol || k == Token::Kind::Eps ||
                k == Token::Kind::LParen)
                parts.push_back(parse_post());
            else
                break;
        }
        if (parts.empty())
            throw ParseError("regex: empty expression");
        return re_concat(std::move(parts));
    }

    RegexPtr parse_post() {
        RegexPtr a = parse_atom();
        while (true) {
            auto k = peek().kind;
            if (k == Token::Kind::Star)
                a = re_star(a);
            else if (k == Token::Kind::Plus)
                a = re_plus(a);
            else if (k == Token::Kind::Opt)
                a = re_opt(a);
            else
                break;
            next();
        }
        return a;
    }

    RegexPtr parse_atom() {
        Token t = next();
        if (t.kind == Token::Kind::Eps)
            return re_epsilon();
        if (t.kind == Token::Kind::Symbol) {
            auto it = std::lower_bound(alphabet.begin(), alphabet.end(), t.text);
            if (it == alphabet.end() || *it != t.text)
                throw UnknownSymbol("regex: symbol not in alphabet: " + t.text);
            return re_symbol(static_cast<int>(it - alphabet.begin()));
        }
        if (t.kind == Token::Kind::LParen) {
            RegexPtr inner = parse_alt();
            if (next().kind != Token::Kind::RParen)
                throw ParseError("regex: expected ')'");
            return inner;
        }
        throw ParseError("regex: unexpected token '" + t.text + "'");
    }
};

} // namespace

RegexAst parse_regex(const std::string &text, const std::vector<Label> &alphabet) {
    std::vector<Label> alpha = alphabet;
    std::sort(alpha.begin(), alpha.end());
    alpha.erase(std::unique(alpha.begin(), alpha.end()), alpha.end());
    for (const auto &l : alpha) {
        if (!valid_token(l))
            throw ParseError("regex: bad alphabet label: " + l);
        if (l == "eps")
            throw ParseError("regex: 'eps' is reserved");
    }
    auto toks = tokenize(text);
    Parser p{toks, alpha};
    RegexPtr root = p.parse_alt();
    if (p.peek().kind != Token::Kind::End)
        throw ParseError("regex: trailing input");
    return RegexAst{std::move(alpha), std::move(root)};
}

namespace {

void to_string_rec(const RegexNode &n, const std::vector<Label> &alpha,
                   std::string &out, int parent_prec) {
    // precedence: alt=0, concat=1, postfix=2
    auto wrap = [&](int prec, auto &&body) {
        bool need = prec < parent_prec;
        if (need)
            out += "( ";
        body();
        if (need)
            out += " )";
    };
    switch (n.kind) {
    case RegexNode::Kind::Epsilon:
        out += "eps";
        break;
    case RegexNode::Kind::Symbol:
        out += alpha[n.symbol];
        break;
    case RegexNode::Kind::Concat:
        wrap(1, [&] {
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                if (i)
                    out += ' ';
                to_string_rec(*n.children[i], alpha, out, 2);
            }
        });
        break;
    case RegexNode::Kind::Alt:
        wrap(0, [&] {
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                if (i)
                    out += " | ";
                to_string_rec(*n.children[i], alpha, out, 1);
            }
        });
        break;
    case RegexNode::Kind::Star:
    case RegexNode::Kind::Plus:
    case RegexNode::Kind::Opt: {
        char op = n.kind == RegexNode::Kind::Star  ? '*'
                  : n.kind == RegexNode::Kind::Plus ? '+'
                                                    : '?';
        to_string_rec(*n.children[0], alpha, out, 3);
        out += op;
        break;
    }
    }
}

} // namespace

std::string regex_to_string(const RegexAst &ast) {
    std::string out;
    to_string_rec(*ast.root, ast.alphabet, out, 0);
    return out;
}

namespace {

// Set of reachable split positions after matching node against w[i..).
void match_positions(const RegexNode &n, const Word &w,
                     const std::vector<int> &alphaidx, const std::set<int> &from,
                     std::set<int> &to) {
    switch (n.kind) {
    case RegexNode::Kind::Epsilon:
        to.insert(from.begin(), from.end());
        return;
    case RegexNode::Kind::Symbol:
        for (int i : from)
            if (i < static_cast<int>(w.size()) && alphaidx[i] == n.symbol)
                to.insert(i + 1);
        return;
    case RegexNode::Kind::Concat: {
        std::set<int> cur = from;
        for (const auto &c : n.children) {
            std::set<int> nxt;
            match_positions(*c, w, alphaidx, cur, nxt);
            cur = std::move(nxt);
            if (cur.empty())
                break;
        }
        to.insert(cur.begin(), cur.end());
        return;
    }
    case RegexNode::Kind::Alt:
        for (const auto &c : n.children)
            match_positions(*c, w, alphaidx, from, to);
        return;
    case RegexNode::Kind::Opt: {
        to.insert(from.begin(), from.end());
        match_positions(*n.children[0], w, alphaidx, from, to);
        return;
    }
    case RegexNode::Kind::Star:
    case RegexNode::Kind::Plus: {
        std::set<int> reached;
        if (n.kind == RegexNode::Kind::Star)
            reached = from;
        std::set<int> frontier = from;
        while (!frontier.empty()) {
            std::set<int> nxt;
            match_positions(*n.children[0], w, alphaidx, frontier, nxt);
            std::set<int> fresh;
            for (int i : nxt)
                if (!reached.count(i)) {
                    reached.insert(i);
                    fresh.insert(i);
                }
            frontier = std::move(fresh);
        }
        to.insert(reached.begin(), reached.end());
        return;
    }
    }
}

} // namespace

bool regex_matches(const RegexAst &ast, const Word &w) {
    std::vector<int> alphaidx;
    for (const auto &l : w) {
        auto it = std::lower_bound(ast.alphabet.begin(), ast.alphabet.end(), l);
        if (it == ast.alphabet.end() || *it != l)
            return false;
        alphaidx.push_back(static_cast<int>(it - ast.alphabet.begin()));
    }
    std::set<int> to;
    match_positions(*ast.root, w, alphaidx, {0}, to);
    return to.count(static_cast<int>(w.size())) > 0;
}

} // namespace rpqview
