// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace minipacs::index {

/// Query syntax:
///
///   query := disj
///   disj  := conj ("OR" conj)*
///   conj  := unary (["AND"] unary)*
///   unary := ["NOT"] atom
///   atom  := "(" disj ")" | term
///   term  := [keyword ":"] (bareword | "quoted string") | "*"
///
/// Operators are uppercase. Patterns may use * (any run) and ? (one
/// character); matching ignores case.
struct QueryNode {
  enum class Kind { MatchAll, Term, And, Or, Not };

  Kind kind = Kind::MatchAll;
  std::optional<std::string> field;  // Term only
  std::string pattern;               // Term only
  std::vector<QueryNode> children;   // And/Or: two or more; Not: one

  static QueryNode match_all() { return {}; }
  static QueryNode term(std::optional<std::string> field, std::string pattern);
  /// Flattens nested nodes of the same kind; a single child is returned as is.
  static QueryNode conj(std::vector<QueryNode> children);
  static QueryNode disj(std::vector<QueryNode> children);
  static QueryNode negate(QueryNode child);

  bool operator==(const QueryNode&) const = default;
};

/// Throws QuerySyntaxError with the byte offset of the offending token.
QueryNode parse_query(std::string_view text);

/// Text that parses back to an equal tree.
std::string to_string(const QueryNode& node);

bool has_wildcards(std::string_view pattern);

/// Glob match over already-lowercased text and pattern.
bool wildcard_match(std::string_view pattern, std::string_view text);

/// Distinct (field, lowercased pattern) terms not under any NOT.
std::vector<QueryNode> positive_terms(const QueryNode& node);

}  // namespace minipacs::index
