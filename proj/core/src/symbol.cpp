#include "primlearn/symbol.h"

#include <memory>
#include <mutex>
#include <unordered_map>

namespace primlearn {
namespace {

struct InternTable {
  std::mutex mu;
  std::unordered_map<std::string_view, std::unique_ptr<std::string>> map;
};

InternTable& table() {
  static InternTable* t = new InternTable;
  return *t;
}

}  // namespace

const std::string& Symbol::empty() {
  static const std::string* e = new std::string;
  return *e;
}

Symbol::Symbol(std::string_view text) {
  if (text.empty()) {
    text_ = &empty();
    return;
  }
  InternTable& t = table();
  std::lock_guard<std::mutex> lock(t.mu);
  auto it = t.map.find(text);
  if (it != t.map.end()) {
    text_ = it->second.get();
    return;
  }
  auto owned = std::make_unique<std::string>(text);
  text_ = owned.get();
  t.map.emplace(std::string_view(*owned), std::move(owned));
}

}  // namespace primlearn
