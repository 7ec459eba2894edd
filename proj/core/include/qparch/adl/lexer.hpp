#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qparch/adl/ast.hpp"

namespace qparch::adl {

struct Token {
  enum class Kind {
    Name,      // identifier segment or dotted identifier (a.b.c)
    Int,       // 42, -7
    Float,     // 7.5, -0.25
    Dotted,    // 192.168.1.201 (address-like literal)
    Duration,  // 50msec / 1sec / 250usec
    String,    // "src"
    Colon,
    LBrace,
    RBrace,
    Equals,
    DotDot,    // .. (range in PERIOD extension)
    End,
  };

  Kind kind = Kind::End;
  std::string text;   // raw spelling (without quotes for strings)
  Micros duration = 0;
  SourcePos pos;

  bool is(Kind k) const { return kind == k; }
};

struct LexError {
  SourcePos pos;
  std::string message;
};

// Tokenizes a whole module. '#' starts a comment running to end of line.
// Returns tokens ending with an End token; lexical problems are collected in
// errors (malformed duration literals, unterminated strings, stray bytes).
std::vector<Token> lex(std::string_view source, std::vector<LexError>& errors);

// True if the token names a class field (ALL_CAPS convention of the grammar).
bool is_field_name(std::string_view name);

// Re-renders a token exactly as the printer would (quotes strings, keeps raw
// spelling otherwise); used for opaque round-tripping.
std::string render_token(const Token& t);

}  // namespace qparch::adl
