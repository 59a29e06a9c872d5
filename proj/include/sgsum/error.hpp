#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sgsum {

// Raised for invalid inputs, violated preconditions and checked numeric
// failures (shape mismatch, non-finite values).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

template <typename... Args>
[[noreturn]] void fail(Args&&... args) {
  std::ostringstream os;
  (os << ... << std::forward<Args>(args));
  throw Error(os.str());
}

// Throws one Error listing every message, one per line; no-op when empty.
inline void throw_violations(const std::vector<std::string>& messages) {
  if (messages.empty()) return;
  std::string text = messages.front();
  for (std::size_t i = 1; i < messages.size(); ++i) text += "\n" + messages[i];
  throw Error(text);
}

}  // namespace detail

#define SGSUM_CHECK(cond, ...)                    \
  do {                                            \
    if (!(cond)) ::sgsum::detail::fail(__VA_ARGS__); \
  } while (false)

}  // namespace sgsum
