#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "nrpuf/errors.hpp"

namespace nrpuf {

using BigInt = boost::multiprecision::cpp_int;

/// eq5:    C(N,cs) * C(M,2) * l
/// table1: C(N,cs) * C(M,2) * log2(C(M,2)), where the log2 factor is
///         either real-valued (result floored once at the end) or
///         truncated to an integer first.
enum class CrpFormula { eq5, table1 };
enum class Log2Mode { real, floor };

inline BigInt binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;  // exact: r is C(n-k+i, i) after this step
  }
  return r;
}

inline BigInt crp_count(std::uint64_t n_cols, std::uint64_t m_rows, std::uint64_t cs,
                        std::uint64_t l, CrpFormula formula, Log2Mode mode = Log2Mode::real) {
  if (cs < 1 || cs > n_cols) throw ConfigError("crp_count: need 1 <= cs <= N");
  if (m_rows < 2) throw ConfigError("crp_count: need M >= 2");
  const BigInt columns = binomial(n_cols, cs);
  const BigInt pairs = binomial(m_rows, 2);
  if (formula == CrpFormula::eq5) {
    if (l < 1) throw ConfigError("crp_count: need l >= 1");
    return columns * pairs * l;
  }
  if (mode == Log2Mode::floor) return columns * pairs * boost::multiprecision::msb(pairs);
  using Float = boost::multiprecision::cpp_bin_float_100;
  const Float product = Float(columns * pairs) * boost::multiprecision::log2(Float(pairs));
  return BigInt(boost::multiprecision::floor(product));
}

inline CrpFormula parse_crp_formula(const std::string& s) {
  if (s == "eq5") return CrpFormula::eq5;
  if (s == "table1") return CrpFormula::table1;
  throw ConfigError("unknown CRP formula '" + s + "' (expected eq5 or table1)");
}

inline Log2Mode parse_log2_mode(const std::string& s) {
  if (s == "real") return Log2Mode::real;
  if (s == "floor") return Log2Mode::floor;
  throw ConfigError("unknown log2 mode '" + s + "' (expected real or floor)");
}

}  // namespace nrpuf
