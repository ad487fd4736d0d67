#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>

#include "tracequery/automata/automaton.hpp"
#include "tracequery/ltlf/progression.hpp"
#include "tracequery/ltlf/syntax.hpp"

namespace tracequery::automata {

// Process-wide memo of compiled automata, keyed by canonical formula text.
// get-or-insert is atomic: concurrent callers for the same formula compile it
// once and share the result.
class AutomatonCache {
 public:
  explicit AutomatonCache(CompileOptions options = {}) : options_(options) {}

  std::shared_ptr<const SymbolicAutomaton> forward(const Formula& f) { return lookup(f, false); }

  // reverse(compile(f))
  std::shared_ptr<const SymbolicAutomaton> reversed(const Formula& f) { return lookup(f, true); }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
  }

  void clear() {
    std::lock_guard lock(mutex_);
    entries_.clear();
  }

  const CompileOptions& options() const noexcept { return options_; }

 private:
  std::shared_ptr<const SymbolicAutomaton> lookup(const Formula& f, bool reversed) {
    std::string key = (reversed ? "R:" : "F:") + ltlf::to_string(ltlf::normalize(f));
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it != entries_.end()) return it->second;
    std::shared_ptr<const SymbolicAutomaton> built;
    if (reversed) {
      auto fwd_key = "F:" + key.substr(2);
      auto fwd = entries_.find(fwd_key);
      if (fwd == entries_.end()) {
        fwd = entries_.emplace(fwd_key, std::make_shared<const SymbolicAutomaton>(compile(f, options_))).first;
      }
      built = std::make_shared<const SymbolicAutomaton>(reverse(*fwd->second));
    } else {
      built = std::make_shared<const SymbolicAutomaton>(compile(f, options_));
    }
    entries_.emplace(key, built);
    return built;
  }

  CompileOptions options_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::shared_ptr<const SymbolicAutomaton>> entries_;
};

inline AutomatonCache& default_cache() {
  static AutomatonCache cache;
  return cache;
}

}  // namespace tracequery::automata
