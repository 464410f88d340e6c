#pragma once

// Kneading sequences over external addresses. Entry i records which strip
// interval (k.s, (k+1).s) the shifted address sigma^{i-1}(s) falls into:
//
//   sigma^i(s) > s  =>  Plain{s_i}
//   sigma^i(s) < s  =>  Plain{s_i - 1}
//   sigma^i(s) = s  =>  Boundary{s_i}, the symbol <s_i - 1 | s_i>
//
// which is the interval test resolved through the common first entry s_i.
// Everything here is exact integer combinatorics.

#include <optional>
#include <string>
#include <vector>

#include "address.hpp"
#include "common.hpp"
#include "config.hpp"

namespace expmap {

struct KneadingSymbol {
  bool boundary = false;  // Boundary{k} means the pair <k-1|k>
  long long k = 0;

  bool operator==(const KneadingSymbol& o) const {
    return boundary == o.boundary && k == o.k;
  }
  bool operator!=(const KneadingSymbol& o) const { return !(*this == o); }
};

struct KneadingSequence {
  std::vector<KneadingSymbol> preperiod;
  std::vector<KneadingSymbol> period;  // nonempty, primitive

  KneadingSymbol at(size_t i) const {  // 0-based
    if (i < preperiod.size()) return preperiod[i];
    return period[(i - preperiod.size()) % period.size()];
  }
  bool has_boundary() const {
    for (const auto& s : preperiod)
      if (s.boundary) return true;
    for (const auto& s : period)
      if (s.boundary) return true;
    return false;
  }
  bool operator==(const KneadingSequence& o) const {
    return preperiod == o.preperiod && period == o.period;
  }
};

namespace detail {

// lexicographic verdict of sigma^i(s) against s; both are tails of the same
// eventually periodic sequence, so entries past preperiod+period repeat and
// a window of that length plus one decides
inline int cmp_shift_vs_self(const ExternalAddress& s, size_t i) {
  size_t bound = s.preperiod.size() + s.period.size() + 2;
  for (size_t j = 0; j < bound; ++j) {
    long long u = s.entry(i + j), v = s.entry(j);
    if (u != v) return u < v ? -1 : 1;
  }
  return 0;
}

}  // namespace detail

inline KneadingSequence kneading_sequence(const ExternalAddress& input) {
  ExternalAddress s = input;
  s.canonicalize();
  size_t np = s.preperiod.size(), nq = s.period.size();
  std::vector<KneadingSymbol> all;
  all.reserve(np + nq);
  for (size_t i = 1; i <= np + nq; ++i) {
    long long si = s.entry(i - 1);
    int c = detail::cmp_shift_vs_self(s, i);
    if (c > 0) all.push_back({false, si});
    else if (c < 0) all.push_back({false, si - 1});
    else all.push_back({true, si});
  }
  KneadingSequence out;
  out.preperiod.assign(all.begin(), all.begin() + np);
  out.period.assign(all.begin() + np, all.end());
  detail::canonicalize_seq(out.preperiod, out.period);
  return out;
}

struct KneadingDisagreement {
  int index = 0;  // 1-based position of the first differing entry
  bool boundary_compatible = false;  // Boundary{k} vs Plain{k-1} or Plain{k}
};

// Compares entries of K(a) and K(b); nullopt means the kneading sequences
// are identical. Boundary-vs-Plain counts as a disagreement, with the
// straddle relation reported on the side.
inline std::optional<KneadingDisagreement> first_kneading_disagreement(
    const ExternalAddress& a, const ExternalAddress& b) {
  ExternalAddress ca = a, cb = b;
  ca.canonicalize();
  cb.canonicalize();
  require(ca != cb, "first_kneading_disagreement: addresses must differ");
  KneadingSequence ka = kneading_sequence(ca), kb = kneading_sequence(cb);
  size_t bound = ka.preperiod.size() + kb.preperiod.size() +
                 std::lcm(ka.period.size(), kb.period.size()) + 1;
  for (size_t i = 0; i < bound; ++i) {
    KneadingSymbol sa = ka.at(i), sb = kb.at(i);
    if (sa == sb) continue;
    bool compat = false;
    if (sa.boundary != sb.boundary) {
      const KneadingSymbol& bnd = sa.boundary ? sa : sb;
      const KneadingSymbol& pln = sa.boundary ? sb : sa;
      compat = pln.k == bnd.k || pln.k == bnd.k - 1;
    }
    return KneadingDisagreement{(int)i + 1, compat};
  }
  return std::nullopt;
}

struct SectorCheck {
  bool period_mismatch = false;
  bool almost_equal = false;
};

// Tests the "almost equal" relation between a periodic kneading sequence of
// period qn and a sector word of length n: plain equality away from
// multiples of qn, and at multiples the entry must be one of the two
// boundary symbols around the expected value. K's primitive period may be a
// proper divisor of qn (the check runs on the cyclic expansion); anything
// not dividing qn, or a preperiodic K, is a period mismatch.
inline SectorCheck sector_almost_equal(const KneadingSequence& K,
                                       const std::vector<long long>& sector,
                                       int q) {
  require(q >= 1, "sector_almost_equal: q must be positive");
  require(!sector.empty(), "sector_almost_equal: sector word is empty");
  size_t n = sector.size();
  size_t qn = (size_t)q * n;
  if (!K.preperiod.empty() || qn % K.period.size() != 0)
    return {true, false};
  for (size_t i = 1; i <= qn; ++i) {
    KneadingSymbol sym = K.at(i - 1);
    long long c = sector[(i - 1) % n];
    if (i % qn == 0) {
      if (!(sym.boundary && (sym.k == c || sym.k == c + 1)))
        return {false, false};
    } else {
      if (sym.boundary || sym.k != c) return {false, false};
    }
  }
  return {false, true};
}

struct EscapeAddress {
  std::vector<long long> entries;
  // set when a strip index was within ambiguous_strip_tol of a half-integer;
  // entries stop just before that position (1-based)
  std::optional<int> ambiguous_at;
};

// Reads strip indices round(Im z_j / 2pi) off an escaping orbit. Each
// iteration step multiplies the absolute error of the imaginary part by
// e^{Re z_j}, so entries are emitted only while the accumulated
// amplification sum of max(Re z_j, 0) stays below prefix_error_budget;
// later entries would be numerically meaningless in double precision.
inline EscapeAddress address_of_escape(const std::vector<Complex>& orbit,
                                       const Config& cfg = {}) {
  EscapeAddress out;
  double amplification = 0.0;
  for (size_t j = 0; j < orbit.size(); ++j) {
    const Complex& z = orbit[j];
    if (amplification > cfg.prefix_error_budget ||
        std::abs(z.imag()) > cfg.im_cap)
      break;
    double x = z.imag() / kTwoPi;
    double frac = x - std::floor(x);
    if (std::abs(frac - 0.5) < cfg.ambiguous_strip_tol) {
      out.ambiguous_at = (int)j + 1;
      break;
    }
    out.entries.push_back(std::llround(x));
    amplification += std::max(z.real(), 0.0);
  }
  return out;
}

// ---- text form: Plain{k} prints as k, Boundary{k} as <k-1|k> ----

inline std::string to_string(const KneadingSymbol& s) {
  if (!s.boundary) return std::to_string(s.k);
  return "<" + std::to_string(s.k - 1) + "|" + std::to_string(s.k) + ">";
}

inline std::string to_string(const KneadingSequence& K) {
  std::string out;
  for (size_t i = 0; i < K.preperiod.size(); ++i) {
    if (i) out += ',';
    out += to_string(K.preperiod[i]);
  }
  if (!K.preperiod.empty()) out += ';';
  for (size_t i = 0; i < K.period.size(); ++i) {
    if (i) out += ',';
    out += to_string(K.period[i]);
  }
  if (K.preperiod.empty())
    out += " (period " + std::to_string(K.period.size()) + ")";
  else
    out += " (preperiod " + std::to_string(K.preperiod.size()) + ", period " +
           std::to_string(K.period.size()) + ")";
  return out;
}

}  // namespace expmap
