// base.hh -- shared small types and error reporting
#pragma once

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace mcaret {

class McError : public std::runtime_error {
public:
  explicit McError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {
inline void cat_into(std::ostringstream&) {}
template <typename T, typename... Rest>
void cat_into(std::ostringstream& os, const T& v, const Rest&... rest) {
  os << v;
  cat_into(os, rest...);
}
}  // namespace detail

template <typename... Args>
std::string cat(const Args&... args) {
  std::ostringstream os;
  detail::cat_into(os, args...);
  return os.str();
}

template <typename... Args>
[[noreturn]] void fail(const Args&... args) {
  throw McError(cat(args...));
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw McError(msg);
}

// Combines hashes, boost-style.
inline void hash_mix(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2);
}

}  // namespace mcaret
