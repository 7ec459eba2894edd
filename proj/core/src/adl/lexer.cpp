#include "qparch/adl/lexer.hpp"

#include <cctype>

namespace qparch::adl {

namespace {

bool name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

class Cursor {
 public:
  explicit Cursor(std::string_view s) : src_(s) {}

  bool done() const { return i_ >= src_.size(); }
  char peek(size_t ahead = 0) const {
    return i_ + ahead < src_.size() ? src_[i_ + ahead] : '\0';
  }
  char take() {
    char c = src_[i_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }
  SourcePos pos() const { return {line_, col_}; }

 private:
  std::string_view src_;
  size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

bool is_field_name(std::string_view name) {
  if (name.empty() || !std::isupper(static_cast<unsigned char>(name[0])))
    return false;
  for (char c : name) {
    if (std::islower(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::string render_token(const Token& t) {
  if (t.kind == Token::Kind::String) return "\"" + t.text + "\"";
  return t.text;
}

std::vector<Token> lex(std::string_view source, std::vector<LexError>& errors) {
  std::vector<Token> out;
  Cursor c(source);

  auto push = [&](Token::Kind k, std::string text, SourcePos pos) {
    Token t;
    t.kind = k;
    t.text = std::move(text);
    t.pos = pos;
    out.push_back(std::move(t));
  };

  while (!c.done()) {
    char ch = c.peek();
    SourcePos pos = c.pos();
    if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
      c.take();
      continue;
    }
    if (ch == '#') {
      while (!c.done() && c.peek() != '\n') c.take();
      continue;
    }
    if (ch == '{') {
      c.take();
      push(Token::Kind::LBrace, "{", pos);
      continue;
    }
    if (ch == '}') {
      c.take();
      push(Token::Kind::RBrace, "}", pos);
      continue;
    }
    if (ch == ':') {
      c.take();
      push(Token::Kind::Colon, ":", pos);
      continue;
    }
    if (ch == '=') {
      c.take();
      push(Token::Kind::Equals, "=", pos);
      continue;
    }
    if (ch == '.' && c.peek(1) == '.') {
      c.take();
      c.take();
      push(Token::Kind::DotDot, "..", pos);
      continue;
    }
    if (ch == '"') {
      c.take();
      std::string body;
      bool closed = false;
      while (!c.done()) {
        char k = c.take();
        if (k == '\\' && (c.peek() == '"' || c.peek() == '\\')) {
          body.push_back(c.take());
          continue;
        }
        if (k == '"') {
          closed = true;
          break;
        }
        if (k == '\n') break;
        body.push_back(k);
      }
      if (!closed) {
        errors.push_back({pos, "unterminated string literal"});
        continue;
      }
      push(Token::Kind::String, std::move(body), pos);
      continue;
    }
    if (digit(ch) || (ch == '-' && digit(c.peek(1)))) {
      std::string text;
      if (ch == '-') text.push_back(c.take());
      while (digit(c.peek())) text.push_back(c.take());
      // unit suffix directly attached -> duration literal
      if (name_start(c.peek())) {
        std::string unit;
        while (name_char(c.peek())) unit.push_back(c.take());
        auto us = parse_duration(text + unit);
        if (!us) {
          errors.push_back({pos, "malformed duration literal '" + text + unit + "'"});
          continue;
        }
        Token t;
        t.kind = Token::Kind::Duration;
        t.text = text + unit;
        t.duration = *us;
        t.pos = pos;
        out.push_back(std::move(t));
        continue;
      }
      int dots = 0;
      while (c.peek() == '.' && digit(c.peek(1))) {
        ++dots;
        text.push_back(c.take());
        while (digit(c.peek())) text.push_back(c.take());
      }
      Token::Kind kind = dots == 0   ? Token::Kind::Int
                         : dots == 1 ? Token::Kind::Float
                                     : Token::Kind::Dotted;
      push(kind, std::move(text), pos);
      continue;
    }
    if (name_start(ch)) {
      std::string text;
      while (name_char(c.peek())) text.push_back(c.take());
      // dotted identifier path: a.b.c (no spaces around the dots)
      while (c.peek() == '.' && name_start(c.peek(1))) {
        text.push_back(c.take());
        while (name_char(c.peek())) text.push_back(c.take());
      }
      push(Token::Kind::Name, std::move(text), pos);
      continue;
    }
    errors.push_back({pos, std::string("unexpected character '") + ch + "'"});
    c.take();
  }

  push(Token::Kind::End, "", c.pos());
  return out;
}

}  // namespace qparch::adl
