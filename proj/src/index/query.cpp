// SPDX-License-Identifier: Apache-2.0
#include "minipacs/index/query.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "minipacs/error.hpp"
#include "minipacs/index/document.hpp"

namespace minipacs::index {

QueryNode QueryNode::term(std::optional<std::string> field, std::string pattern) {
  QueryNode n;
  n.kind = Kind::Term;
  n.field = std::move(field);
  n.pattern = std::move(pattern);
  return n;
}

namespace {

QueryNode combine(QueryNode::Kind kind, std::vector<QueryNode> children) {
  std::vector<QueryNode> flat;
  for (auto& c : children) {
    if (c.kind == kind) {
      for (auto& g : c.children) flat.push_back(std::move(g));
    } else {
      flat.push_back(std::move(c));
    }
  }
  if (flat.size() == 1) return std::move(flat.front());
  QueryNode n;
  n.kind = kind;
  n.children = std::move(flat);
  return n;
}

}  // namespace

QueryNode QueryNode::conj(std::vector<QueryNode> children) { return combine(Kind::And, std::move(children)); }
QueryNode QueryNode::disj(std::vector<QueryNode> children) { return combine(Kind::Or, std::move(children)); }

QueryNode QueryNode::negate(QueryNode child) {
  QueryNode n;
  n.kind = Kind::Not;
  n.children.push_back(std::move(child));
  return n;
}

namespace {

constexpr std::size_t kMaxDepth = 64;

enum class Tok { Word, Quoted, LParen, RParen, End };

struct Token {
  Tok type = Tok::End;
  std::string text;
  std::size_t pos = 0;
  std::size_t end = 0;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
bool is_word_char(char c) { return !is_space(c) && c != '(' && c != ')' && c != '"'; }
bool is_field_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) { advance(); }

  QueryNode parse() {
    if (cur_.type == Tok::End) fail(cur_.pos, "expected a term, found end of input");
    auto node = disj(0);
    if (cur_.type != Tok::End) fail(cur_.pos, fmt::format("unexpected {}", describe(cur_)));
    return node;
  }

 private:
  [[noreturn]] static void fail(std::size_t pos, const std::string& msg) { throw QuerySyntaxError(pos, msg); }

  static std::string describe(const Token& t) {
    switch (t.type) {
      case Tok::Word: return fmt::format("'{}'", t.text);
      case Tok::Quoted: return "quoted string";
      case Tok::LParen: return "'('";
      case Tok::RParen: return "')'";
      case Tok::End: return "end of input";
    }
    return "token";
  }

  void advance() {
    while (i_ < text_.size() && is_space(text_[i_])) ++i_;
    cur_ = Token{};
    cur_.pos = i_;
    if (i_ >= text_.size()) {
      cur_.type = Tok::End;
      cur_.end = i_;
      return;
    }
    char c = text_[i_];
    if (c == '(' || c == ')') {
      cur_.type = c == '(' ? Tok::LParen : Tok::RParen;
      cur_.end = ++i_;
      return;
    }
    if (c == '"') {
      cur_.type = Tok::Quoted;
      ++i_;
      for (;;) {
        if (i_ >= text_.size()) fail(cur_.pos, "unterminated quoted string");
        char d = text_[i_++];
        if (d == '"') break;
        if (d == '\\') {
          if (i_ >= text_.size()) fail(cur_.pos, "unterminated quoted string");
          d = text_[i_++];
        }
        cur_.text.push_back(d);
      }
      cur_.end = i_;
      return;
    }
    cur_.type = Tok::Word;
    while (i_ < text_.size() && is_word_char(text_[i_])) cur_.text.push_back(text_[i_++]);
    cur_.end = i_;
  }

  bool at_operator(std::string_view op) const { return cur_.type == Tok::Word && cur_.text == op; }

  bool starts_unary() const {
    if (cur_.type == Tok::LParen || cur_.type == Tok::Quoted) return true;
    return cur_.type == Tok::Word && cur_.text != "AND" && cur_.text != "OR";
  }

  QueryNode disj(std::size_t depth) {
    std::vector<QueryNode> parts;
    parts.push_back(conj(depth));
    while (at_operator("OR")) {
      advance();
      parts.push_back(conj(depth));
    }
    return QueryNode::disj(std::move(parts));
  }

  QueryNode conj(std::size_t depth) {
    std::vector<QueryNode> parts;
    parts.push_back(unary(depth));
    for (;;) {
      if (at_operator("AND")) {
        advance();
        parts.push_back(unary(depth));
      } else if (starts_unary()) {
        parts.push_back(unary(depth));
      } else {
        break;
      }
    }
    return QueryNode::conj(std::move(parts));
  }

  QueryNode unary(std::size_t depth) {
    if (at_operator("NOT")) {
      advance();
      return QueryNode::negate(atom(depth));
    }
    return atom(depth);
  }

  QueryNode atom(std::size_t depth) {
    if (cur_.type == Tok::LParen) {
      if (depth >= kMaxDepth) fail(cur_.pos, "parentheses nested too deeply");
      advance();
      auto inner = disj(depth + 1);
      if (cur_.type != Tok::RParen) fail(cur_.pos, fmt::format("expected ')', found {}", describe(cur_)));
      advance();
      return inner;
    }
    if (cur_.type == Tok::Quoted) {
      auto node = QueryNode::term(std::nullopt, cur_.text);
      advance();
      return node;
    }
    if (cur_.type == Tok::Word && cur_.text != "AND" && cur_.text != "OR" && cur_.text != "NOT") {
      return word_term();
    }
    fail(cur_.pos, fmt::format("expected a term, found {}", describe(cur_)));
  }

  QueryNode word_term() {
    auto tok = cur_;
    auto colon = tok.text.find(':');
    if (colon == std::string::npos) {
      advance();
      if (tok.text == "*") return QueryNode::match_all();
      return QueryNode::term(std::nullopt, tok.text);
    }
    auto field = tok.text.substr(0, colon);
    if (field.empty() || !std::all_of(field.begin(), field.end(), is_field_char))
      fail(tok.pos, fmt::format("invalid field name '{}'", field));
    auto rest = tok.text.substr(colon + 1);
    if (!rest.empty()) {
      advance();
      return QueryNode::term(field, rest);
    }
    advance();
    if (cur_.type != Tok::Quoted || cur_.pos != tok.end)
      fail(tok.end, fmt::format("expected a value after '{}:'", field));
    auto node = QueryNode::term(field, cur_.text);
    advance();
    return node;
  }

  std::string_view text_;
  std::size_t i_ = 0;
  Token cur_;
};

bool bareword_safe(const QueryNode& n) {
  const auto& p = n.pattern;
  if (p.empty() || p == "AND" || p == "OR" || p == "NOT") return false;
  if (!n.field && (p == "*" || p.find(':') != std::string::npos)) return false;
  return std::all_of(p.begin(), p.end(), is_word_char);
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void collect_positive(const QueryNode& n, std::vector<QueryNode>& out, std::set<std::pair<std::string, std::string>>& seen) {
  switch (n.kind) {
    case QueryNode::Kind::Term: {
      auto key = std::make_pair(n.field ? "f:" + *n.field : std::string("*"), to_lower(n.pattern));
      if (seen.insert(key).second) out.push_back(n);
      break;
    }
    case QueryNode::Kind::And:
    case QueryNode::Kind::Or:
      for (auto& c : n.children) collect_positive(c, out, seen);
      break;
    default: break;
  }
}

}  // namespace

QueryNode parse_query(std::string_view text) { return Parser(text).parse(); }

std::string to_string(const QueryNode& node) {
  using K = QueryNode::Kind;
  switch (node.kind) {
    case K::MatchAll: return "*";
    case K::Term: {
      auto value = bareword_safe(node) ? node.pattern : quote(node.pattern);
      return node.field ? *node.field + ":" + value : value;
    }
    case K::Not: return "NOT (" + to_string(node.children.front()) + ")";
    case K::And:
    case K::Or: {
      std::string out;
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        if (i) out += node.kind == K::And ? " AND " : " OR ";
        out += "(" + to_string(node.children[i]) + ")";
      }
      return out;
    }
  }
  return "*";
}

bool has_wildcards(std::string_view pattern) { return pattern.find_first_of("*?") != std::string_view::npos; }

bool wildcard_match(std::string_view pattern, std::string_view text) {
  std::size_t p = 0, t = 0;
  std::size_t star = std::string_view::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
      ++p;
      ++t;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

std::vector<QueryNode> positive_terms(const QueryNode& node) {
  std::vector<QueryNode> out;
  std::set<std::pair<std::string, std::string>> seen;
  collect_positive(node, out, seen);
  return out;
}

}  // namespace minipacs::index
