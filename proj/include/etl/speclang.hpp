#pragma once

// speclang.hpp
//
// Textual formula language ("ETL-text v1") and the target manifest
// binding identifiers to embedding files.
//
// Grammar (EBNF):
//   formula := or ;
//   or      := and { "|" and } ;
//   and     := until { "&" until } ;
//   until   := unary [ "U" until ] ;            (right-associative)
//   unary   := "!" unary | "F" unary | "G" unary | atom ;
//   atom    := "(" formula ")" | "true" | pred ;
//   pred    := "dist" "(" "z" "," IDENT ")" CMP NUMBER ;
//   CMP     := "<=" | "<" | ">" | ">=" ;
//
// "<="/"<" bind as reach predicates, ">"/">=" as avoid predicates; the
// strict/non-strict distinction collapses in the signed normal form.
// The lexer also accepts the Unicode aliases ! <- ¬, & <- ∧, | <- ∨,
// F <- ◊, G <- □.

#include <cctype>
#include <charconv>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "etl/core.hpp"
#include "etl/io.hpp"
#include "etl/logic.hpp"
#include "etl/metrics.hpp"

namespace etl {

// Positioned error; what() is formatted as "line:col: message".
class ParseError : public Error {
 public:
  ParseError(Errc code, std::size_t line, std::size_t col,
             const std::string& message)
      : Error(code,
              std::to_string(line) + ":" + std::to_string(col) + ": " +
                  message,
              Preformatted{}),
        line_(line),
        col_(col) {}

  std::size_t line() const { return line_; }
  std::size_t col() const { return col_; }

 private:
  std::size_t line_;
  std::size_t col_;
};

inline bool valid_identifier(std::string_view name) {
  if (name.empty()) return false;
  auto head = static_cast<unsigned char>(name.front());
  if (!std::isalpha(head) && name.front() != '_') return false;
  for (char c : name.substr(1)) {
    auto u = static_cast<unsigned char>(c);
    if (!std::isalnum(u) && c != '_') return false;
  }
  return true;
}

// Named target embeddings available to the parser.
class Manifest {
 public:
  struct Entry {
    Embedding embedding;
    Metric metric;
    std::optional<double> default_threshold;
  };

  void add(const std::string& name, Embedding embedding, Metric metric,
           std::optional<double> default_threshold = std::nullopt) {
    if (!valid_identifier(name))
      throw Error(Errc::schema_error,
                  "manifest name '" + name + "' is not a valid identifier");
    if (!metric_compatible(metric, embedding.kind()))
      throw Error(Errc::incompatible_metric,
                  "target '" + name + "': " + metric_name(metric) +
                      " cannot evaluate " + kind_name(embedding.kind()) +
                      " embeddings");
    entries_.insert_or_assign(
        name, Entry{std::move(embedding), metric, default_threshold});
  }

  const Entry* find(const std::string& name) const {
    auto it = entries_.find(name);
    return it == entries_.end() ? nullptr : &it->second;
  }

  TargetRef target(const std::string& name) const {
    const Entry* e = find(name);
    if (!e)
      throw Error(Errc::unresolved_identifier,
                  "no manifest entry for '" + name + "'");
    return TargetRef(name, e->embedding, e->metric);
  }

  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, Entry>& entries() const { return entries_; }

 private:
  std::map<std::string, Entry> entries_;
};

/// Loads {"targets": {"<name>": {"file": "...", "metric": "...",
/// "threshold": optional}}}. Embedding files resolve relative to the
/// manifest's directory.
inline Manifest load_manifest(const std::string& path) {
  const nlohmann::json j =
      detail::parse_json(detail::read_file(path), path);
  if (!j.is_object() || !j.contains("targets") || !j.at("targets").is_object())
    throw Error(Errc::schema_error,
                "manifest must be {\"targets\": {name: {...}}}");

  const auto base = std::filesystem::path(path).parent_path();
  Manifest m;
  for (const auto& [name, entry] : j.at("targets").items()) {
    if (!entry.is_object() || !entry.contains("file") ||
        !entry.contains("metric"))
      throw Error(Errc::schema_error,
                  "manifest target '" + name +
                      "' needs \"file\" and \"metric\" fields");
    const auto file = base / entry.at("file").get<std::string>();
    std::optional<double> threshold;
    if (entry.contains("threshold"))
      threshold = entry.at("threshold").get<double>();
    m.add(name, load_embedding(file.string()),
          parse_metric(entry.at("metric").get<std::string>()), threshold);
  }
  return m;
}

struct SpecSource {
  std::string text;
  Manifest manifest;
};

// ── lexer ─────────────────────────────────────────────────────────

namespace detail {

enum class Tok {
  lparen, rparen, comma, bang, amp, pipe,
  op_f, op_g, op_u,
  kw_true, kw_dist, kw_z,
  ident, number,
  cmp_le, cmp_lt, cmp_gt, cmp_ge,
  end,
};

inline const char* tok_name(Tok t) {
  switch (t) {
    case Tok::lparen: return "'('";
    case Tok::rparen: return "')'";
    case Tok::comma: return "','";
    case Tok::bang: return "'!'";
    case Tok::amp: return "'&'";
    case Tok::pipe: return "'|'";
    case Tok::op_f: return "'F'";
    case Tok::op_g: return "'G'";
    case Tok::op_u: return "'U'";
    case Tok::kw_true: return "'true'";
    case Tok::kw_dist: return "'dist'";
    case Tok::kw_z: return "'z'";
    case Tok::ident: return "identifier";
    case Tok::number: return "number";
    case Tok::cmp_le: return "'<='";
    case Tok::cmp_lt: return "'<'";
    case Tok::cmp_gt: return "'>'";
    case Tok::cmp_ge: return "'>='";
    case Tok::end: return "end of input";
  }
  return "?";
}

struct Token {
  Tok tok;
  std::string text;
  double value = 0.0;  // number tokens
  std::size_t line = 1;
  std::size_t col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\r') {
        advance(1);
        continue;
      }
      if (try_symbol(out)) continue;
      const auto u = static_cast<unsigned char>(c);
      if (std::isdigit(u)) {
        lex_number(out);
        continue;
      }
      if (std::isalpha(u) || c == '_') {
        lex_word(out);
        continue;
      }
      throw ParseError(Errc::parse_error, line_, col_,
                       "unexpected character");
    }
    out.push_back(Token{Tok::end, "", 0.0, line_, col_});
    return out;
  }

 private:
  void advance(std::size_t n) {
    pos_ += n;
    col_ += n;
  }

  bool match(std::string_view s) {
    return src_.substr(pos_, s.size()) == s;
  }

  void emit(std::vector<Token>& out, Tok tok, std::size_t len) {
    out.push_back(Token{tok, std::string(src_.substr(pos_, len)), 0.0, line_,
                        col_});
    advance(len);
  }

  bool try_symbol(std::vector<Token>& out) {
    // Two-byte comparison operators before single-byte ones.
    if (match("<=")) { emit(out, Tok::cmp_le, 2); return true; }
    if (match(">=")) { emit(out, Tok::cmp_ge, 2); return true; }
    switch (src_[pos_]) {
      case '(': emit(out, Tok::lparen, 1); return true;
      case ')': emit(out, Tok::rparen, 1); return true;
      case ',': emit(out, Tok::comma, 1); return true;
      case '!': emit(out, Tok::bang, 1); return true;
      case '&': emit(out, Tok::amp, 1); return true;
      case '|': emit(out, Tok::pipe, 1); return true;
      case '<': emit(out, Tok::cmp_lt, 1); return true;
      case '>': emit(out, Tok::cmp_gt, 1); return true;
      default: break;
    }
    // UTF-8 aliases from the written notation.
    if (match("\xC2\xAC")) { emit(out, Tok::bang, 2); return true; }        // ¬
    if (match("\xE2\x88\xA7")) { emit(out, Tok::amp, 3); return true; }     // ∧
    if (match("\xE2\x88\xA8")) { emit(out, Tok::pipe, 3); return true; }    // ∨
    if (match("\xE2\x97\x8A")) { emit(out, Tok::op_f, 3); return true; }    // ◊
    if (match("\xE2\x96\xA1")) { emit(out, Tok::op_g, 3); return true; }    // □
    return false;
  }

  void lex_number(std::vector<Token>& out) {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    auto digits = [&] {
      const std::size_t from = end;
      while (end < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[end])))
        ++end;
      return end > from;
    };
    digits();
    if (end < src_.size() && src_[end] == '.') {
      ++end;
      if (!digits())
        throw ParseError(Errc::parse_error, line_, col_,
                         "expected digits after decimal point");
    }
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      ++end;
      if (end < src_.size() && (src_[end] == '+' || src_[end] == '-')) ++end;
      if (!digits())
        throw ParseError(Errc::parse_error, line_, col_,
                         "expected digits in exponent");
    }
    const std::string_view text = src_.substr(start, end - start);
    double value = 0.0;
    const auto res =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
      throw ParseError(Errc::parse_error, line_, col_, "malformed number");
    out.push_back(Token{Tok::number, std::string(text), value, line_, col_});
    advance(end - start);
  }

  void lex_word(std::vector<Token>& out) {
    std::size_t end = pos_;
    while (end < src_.size()) {
      const auto u = static_cast<unsigned char>(src_[end]);
      if (!std::isalnum(u) && src_[end] != '_') break;
      ++end;
    }
    const std::string_view word = src_.substr(pos_, end - pos_);
    Tok tok = Tok::ident;
    if (word == "F") tok = Tok::op_f;
    else if (word == "G") tok = Tok::op_g;
    else if (word == "U") tok = Tok::op_u;
    else if (word == "true") tok = Tok::kw_true;
    else if (word == "dist") tok = Tok::kw_dist;
    else if (word == "z") tok = Tok::kw_z;
    emit(out, tok, word.size());
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

// Recursive-descent parser over the token stream.
class Parser {
 public:
  Parser(std::vector<Token> tokens, const Manifest& manifest)
      : tokens_(std::move(tokens)), manifest_(&manifest) {}

  Formula run() {
    Formula f = parse_or();
    expect(Tok::end);
    return f;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }

  bool accept(Tok t) {
    if (peek().tok != t) return false;
    ++pos_;
    return true;
  }

  Token expect(Tok t) {
    if (peek().tok != t)
      throw ParseError(Errc::parse_error, peek().line, peek().col,
                       std::string("expected ") + tok_name(t) + ", found " +
                           tok_name(peek().tok));
    return tokens_[pos_++];
  }

  Formula parse_or() {
    Formula f = parse_and();
    while (accept(Tok::pipe)) f = Formula::disjunction(f, parse_and());
    return f;
  }

  Formula parse_and() {
    Formula f = parse_until();
    while (accept(Tok::amp)) f = Formula::conjunction(f, parse_until());
    return f;
  }

  Formula parse_until() {
    Formula f = parse_unary();
    if (accept(Tok::op_u)) return Formula::until(f, parse_until());
    return f;
  }

  Formula parse_unary() {
    if (accept(Tok::bang)) return Formula::negation(parse_unary());
    if (accept(Tok::op_f)) return Formula::eventually(parse_unary());
    if (accept(Tok::op_g)) return Formula::always(parse_unary());
    return parse_atom();
  }

  Formula parse_atom() {
    if (accept(Tok::lparen)) {
      Formula f = parse_or();
      expect(Tok::rparen);
      return f;
    }
    if (accept(Tok::kw_true)) return Formula::truth();
    if (peek().tok == Tok::kw_dist) return parse_pred();
    throw ParseError(Errc::parse_error, peek().line, peek().col,
                     std::string("expected '(', 'true' or 'dist', found ") +
                         tok_name(peek().tok));
  }

  Formula parse_pred() {
    expect(Tok::kw_dist);
    expect(Tok::lparen);
    expect(Tok::kw_z);
    expect(Tok::comma);
    const Token name = expect(Tok::ident);
    expect(Tok::rparen);

    Sense sense;
    switch (peek().tok) {
      case Tok::cmp_le:
      case Tok::cmp_lt:
        sense = Sense::reach;
        ++pos_;
        break;
      case Tok::cmp_gt:
      case Tok::cmp_ge:
        sense = Sense::avoid;
        ++pos_;
        break;
      default:
        throw ParseError(Errc::parse_error, peek().line, peek().col,
                         std::string("expected comparison, found ") +
                             tok_name(peek().tok));
    }
    const Token eps = expect(Tok::number);

    const Manifest::Entry* entry = manifest_->find(name.text);
    if (!entry)
      throw ParseError(Errc::unresolved_identifier, name.line, name.col,
                       "unresolved identifier '" + name.text + "'");
    return Formula::predicate(
        Predicate(TargetRef(name.text, entry->embedding, entry->metric),
                  eps.value, sense));
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const Manifest* manifest_;
};

inline std::string format_threshold(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

/// Parses formula text against a manifest. Errors carry line:col.
inline Formula parse(const std::string& text, const Manifest& manifest) {
  return detail::Parser(detail::Lexer(text).run(), manifest).run();
}

inline Formula parse(const SpecSource& src) {
  return parse(src.text, src.manifest);
}

/// Canonical fully parenthesized text; parse(pretty(f)) rebuilds a
/// structurally equal tree. Thresholds print in shortest round-trip
/// form (up to 17 significant digits).
inline std::string pretty(const Formula& f) {
  switch (f.op()) {
    case Op::pred: {
      const Predicate& p = f.pred();
      const char* cmp = p.sense == Sense::reach ? "<=" : ">";
      return "(dist(z, " + p.target.name + ") " + cmp + " " +
             detail::format_threshold(p.threshold) + ")";
    }
    case Op::truth:
      return "true";
    case Op::negation:
      return "! (" + pretty(f.child()) + ")";
    case Op::eventually:
      return "F (" + pretty(f.child()) + ")";
    case Op::always:
      return "G (" + pretty(f.child()) + ")";
    case Op::conjunction:
      return "(" + pretty(f.lhs()) + " & " + pretty(f.rhs()) + ")";
    case Op::disjunction:
      return "(" + pretty(f.lhs()) + " | " + pretty(f.rhs()) + ")";
    case Op::until:
      return "(" + pretty(f.lhs()) + " U " + pretty(f.rhs()) + ")";
  }
  throw Error(Errc::schema_error, "unknown formula operator");
}

}  // namespace etl
