#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

namespace primlearn {

// Interned identifier. Equality is pointer equality; ordering is by text so
// that anything sorted by Symbol is independent of interning order.
class Symbol {
 public:
  Symbol() : text_(&empty()) {}
  explicit Symbol(std::string_view text);

  const std::string& str() const { return *text_; }
  bool empty_name() const { return text_->empty(); }

  bool operator==(const Symbol& o) const { return text_ == o.text_; }
  std::strong_ordering operator<=>(const Symbol& o) const {
    if (text_ == o.text_) return std::strong_ordering::equal;
    int c = text_->compare(*o.text_);
    return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  }

  size_t hash() const { return std::hash<const void*>()(text_); }

 private:
  static const std::string& empty();
  const std::string* text_;
};

}  // namespace primlearn

template <>
struct std::hash<primlearn::Symbol> {
  size_t operator()(const primlearn::Symbol& s) const { return s.hash(); }
};
