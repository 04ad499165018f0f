#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace primlearn {

struct SourcePos {
  int line = 1;
  int col = 1;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, SourcePos pos);
  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
};

struct SExpr {
  enum class Kind { kAtom, kString, kList };
  Kind kind = Kind::kAtom;
  std::string text;  // atom or string contents
  std::vector<SExpr> items;
  SourcePos pos;

  bool is_atom() const { return kind == Kind::kAtom; }
  bool is_list() const { return kind == Kind::kList; }
  bool is_atom(std::string_view s) const { return kind == Kind::kAtom && text == s; }
};

// Reads every top-level datum. ';' starts a comment running to end of line.
std::vector<SExpr> read_sexprs(std::string_view text);

}  // namespace primlearn
