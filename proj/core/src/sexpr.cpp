#include "primlearn/sexpr.h"

#include <cctype>

namespace primlearn {

ParseError::ParseError(const std::string& msg, SourcePos pos)
    : std::runtime_error(std::to_string(pos.line) + ":" + std::to_string(pos.col) + ": " + msg),
      pos_(pos) {}

namespace {

class Reader {
 public:
  explicit Reader(std::string_view text) : s_(text) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    for (skip_space(); i_ < s_.size(); skip_space()) out.push_back(read_one());
    return out;
  }

 private:
  char peek() const { return s_[i_]; }

  void advance() {
    if (s_[i_] == '\n') {
      ++pos_.line;
      pos_.col = 1;
    } else {
      ++pos_.col;
    }
    ++i_;
  }

  void skip_space() {
    while (i_ < s_.size()) {
      char c = peek();
      if (c == ';') {
        while (i_ < s_.size() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  SExpr read_one() {
    SExpr e;
    e.pos = pos_;
    char c = peek();
    if (c == '(' || c == '[') {
      char close = c == '(' ? ')' : ']';
      advance();
      e.kind = SExpr::Kind::kList;
      for (;;) {
        skip_space();
        if (i_ >= s_.size()) throw ParseError("unterminated list", e.pos);
        if (peek() == close) {
          advance();
          return e;
        }
        if (peek() == ')' || peek() == ']') throw ParseError("mismatched bracket", pos_);
        e.items.push_back(read_one());
      }
    }
    if (c == ')' || c == ']') throw ParseError("unexpected ')'", pos_);
    if (c == '"') {
      advance();
      e.kind = SExpr::Kind::kString;
      while (i_ < s_.size() && peek() != '"') {
        if (peek() == '\\' && i_ + 1 < s_.size()) advance();
        e.text += peek();
        advance();
      }
      if (i_ >= s_.size()) throw ParseError("unterminated string", e.pos);
      advance();
      return e;
    }
    while (i_ < s_.size()) {
      char d = peek();
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == '[' ||
          d == ']' || d == '"' || d == ';')
        break;
      e.text += d;
      advance();
    }
    return e;
  }

  std::string_view s_;
  size_t i_ = 0;
  SourcePos pos_;
};

}  // namespace

std::vector<SExpr> read_sexprs(std::string_view text) { return Reader(text).read_all(); }

}  // namespace primlearn
