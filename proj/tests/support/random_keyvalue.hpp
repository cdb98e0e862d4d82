#pragma once

// Random integer-valued key expressions with a plain evaluator to check the
// library's applicative evaluation against.

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "modglue/keys.hpp"

namespace testsupport {

struct Term {
  enum class Op { Pure, Read, Unary, Binary } op = Op::Pure;
  std::int64_t n = 0;   // Pure
  std::size_t key = 0;  // Read
  std::size_t fn = 0;   // Unary / Binary
  std::vector<std::shared_ptr<const Term>> kids;
};

using TermPtr = std::shared_ptr<const Term>;

inline constexpr std::size_t kUnaryCount = 4;
inline constexpr std::size_t kBinaryCount = 3;

std::int64_t unary(std::size_t fn, std::int64_t x);
std::int64_t binary(std::size_t fn, std::int64_t x, std::int64_t y);

/// The library-side function values for the same operations.
modglue::Value unary_value(std::size_t fn);
modglue::Value binary_value(std::size_t fn);  // curried

struct KeyUniverse {
  modglue::KeyRegistry registry;
  std::vector<modglue::KeySpec> keys;

  explicit KeyUniverse(std::size_t n = 4);
  modglue::ResolvedKeys random_readings(std::mt19937_64& rng) const;
};

TermPtr random_term(std::mt19937_64& rng, std::size_t keys, int depth);

modglue::KeyValue to_keyvalue(const Term& t, const KeyUniverse& u);

std::int64_t oracle_eval(const Term& t, const KeyUniverse& u, const modglue::ResolvedKeys& r);

std::set<std::string> oracle_keys(const Term& t, const KeyUniverse& u);

struct LawReport {
  std::size_t cases = 0;  // law instances checked
  std::vector<std::string> failures;
};

/// Per round: evaluation against the oracle, read soundness, and the
/// identity, homomorphism, interchange and composition laws, each over a
/// fresh random tree and fresh random readings.
LawReport check_applicative_laws(std::mt19937_64& rng, std::size_t rounds);

}  // namespace testsupport
