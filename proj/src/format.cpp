#include "catbranch/format.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace catbranch {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_number(std::string_view text, const char* what) {
  auto s = trim(text);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  T value{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument(std::string("invalid ") + what + ": '" + std::string(text) + "'");
  return value;
}

}  // namespace

double parse_double(std::string_view text, const char* what) { return parse_number<double>(text, what); }
std::int64_t parse_int(std::string_view text, const char* what) { return parse_number<std::int64_t>(text, what); }
std::uint64_t parse_u64(std::string_view text, const char* what) { return parse_number<std::uint64_t>(text, what); }

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace catbranch
