#pragma once

#include <array>
#include <charconv>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "ipstat/error.hpp"

namespace ipstat {

/// A dotted-quad IPv4 address held as its four octets. Comparison is
/// lexicographic over (a, b, c, d), which coincides with numeric order of
/// the 32-bit form.
struct IpV4Address {
  std::uint8_t a = 0;
  std::uint8_t b = 0;
  std::uint8_t c = 0;
  std::uint8_t d = 0;

  friend constexpr auto operator<=>(const IpV4Address&, const IpV4Address&) = default;
};

static_assert(sizeof(IpV4Address) == 4);

constexpr std::uint32_t to_u32(IpV4Address addr) noexcept {
  return (std::uint32_t{addr.a} << 24) | (std::uint32_t{addr.b} << 16) |
         (std::uint32_t{addr.c} << 8) | std::uint32_t{addr.d};
}

constexpr IpV4Address from_u32(std::uint32_t word) noexcept {
  return {static_cast<std::uint8_t>(word >> 24), static_cast<std::uint8_t>(word >> 16),
          static_cast<std::uint8_t>(word >> 8), static_cast<std::uint8_t>(word)};
}

/// First three octets of an address (one /24 network).
struct Prefix24 {
  std::uint8_t a = 0;
  std::uint8_t b = 0;
  std::uint8_t c = 0;

  static constexpr std::uint32_t kCount = 1u << 24;

  constexpr std::uint32_t key() const noexcept {
    return (std::uint32_t{a} << 16) | (std::uint32_t{b} << 8) | std::uint32_t{c};
  }

  friend constexpr auto operator<=>(const Prefix24&, const Prefix24&) = default;
};

constexpr Prefix24 prefix_of(IpV4Address addr) noexcept { return {addr.a, addr.b, addr.c}; }

/// Writes the canonical dotted quad (no leading zeros) into `out`, which
/// must hold at least 15 chars. Returns one past the last char written.
inline char* format_to(char* out, IpV4Address addr) noexcept {
  const std::uint8_t octets[4] = {addr.a, addr.b, addr.c, addr.d};
  for (int i = 0; i < 4; ++i) {
    if (i) *out++ = '.';
    out = std::to_chars(out, out + 3, octets[i]).ptr;
  }
  return out;
}

inline std::string format(IpV4Address addr) {
  std::array<char, 16> buf{};
  char* end = format_to(buf.data(), addr);
  return std::string(buf.data(), end);
}

namespace detail {

constexpr bool is_space(char ch) noexcept {
  return ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n' || ch == '\v' || ch == '\f';
}

constexpr bool is_digit(char ch) noexcept { return ch >= '0' && ch <= '9'; }

}  // namespace detail

/// Parses the leading dotted quad of `text`. Leading whitespace and leading
/// zeros inside octets are accepted; anything after the fourth octet must be
/// separated from it by whitespace and is ignored.
inline IpV4Address parse_dotted(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size() && detail::is_space(text[pos])) ++pos;

  std::uint8_t octets[4] = {};
  for (int part = 0; part < 4; ++part) {
    if (part > 0) {
      if (pos >= text.size() || text[pos] != '.') {
        throw Error(ErrorCode::MalformedAddress,
                    "expected 4 dot-separated parts in '" + std::string(text) + "'");
      }
      ++pos;
    }
    const std::size_t start = pos;
    std::uint32_t value = 0;
    while (pos < text.size() && detail::is_digit(text[pos])) {
      value = value * 10 + static_cast<std::uint32_t>(text[pos] - '0');
      if (value > 255) value = 256;  // saturate, keeps long digit runs from wrapping
      ++pos;
    }
    if (pos == start) {
      throw Error(ErrorCode::MalformedAddress,
                  "non-numeric part " + std::to_string(part + 1) + " in '" + std::string(text) + "'");
    }
    if (value > 255) {
      throw Error(ErrorCode::OctetOutOfRange,
                  "part " + std::to_string(part + 1) + " exceeds 255 in '" + std::string(text) + "'");
    }
    octets[part] = static_cast<std::uint8_t>(value);
  }
  if (pos < text.size() && !detail::is_space(text[pos])) {
    throw Error(ErrorCode::MalformedAddress,
                "unexpected trailing characters in '" + std::string(text) + "'");
  }
  return {octets[0], octets[1], octets[2], octets[3]};
}

}  // namespace ipstat
