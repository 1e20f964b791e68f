#pragma once

#include <boost/rational.hpp>

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace palps {

/// Exact probability / count arithmetic.
using Rational = boost::rational<std::int64_t>;

double to_double(const Rational& r);
std::string to_string(const Rational& r);
/// Parses "3", "-2", "0.25", "1/4" exactly. Throws std::invalid_argument.
Rational parse_rational(const std::string& text);

/// Strongly typed dense index.
template <class Tag>
struct Id {
  std::int32_t value = -1;

  constexpr Id() = default;
  constexpr explicit Id(std::int32_t v) : value(v) {}
  constexpr bool valid() const { return value >= 0; }
  constexpr auto operator<=>(const Id&) const = default;
};

struct LocationTag {};
struct SpeciesTag {};
struct ChannelTag {};
struct TermTag {};

using LocationId = Id<LocationTag>;
using SpeciesId = Id<SpeciesTag>;
using ChannelId = Id<ChannelTag>;
using TermId = Id<TermTag>;

/// Base class of all domain errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void hash_combine(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

struct VectorHash {
  std::size_t operator()(const std::vector<std::int32_t>& v) const {
    std::size_t h = v.size();
    for (auto x : v) hash_combine(h, std::hash<std::int32_t>{}(x));
    return h;
  }
  std::size_t operator()(const std::vector<std::int64_t>& v) const {
    std::size_t h = v.size();
    for (auto x : v) hash_combine(h, std::hash<std::int64_t>{}(x));
    return h;
  }
};

}  // namespace palps

template <class Tag>
struct std::hash<palps::Id<Tag>> {
  std::size_t operator()(const palps::Id<Tag>& id) const noexcept {
    return std::hash<std::int32_t>{}(id.value);
  }
};
