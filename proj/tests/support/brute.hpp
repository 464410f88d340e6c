#pragma once

// Brute-force reference implementations for the symbolic layer, written
// against the raw definitions before the library existed and kept
// independent of it on purpose: sequences are expanded to explicit finite
// prefixes and compared entry by entry, and kneading entries are found by
// scanning candidate k over the interval test  k.s < shifted < (k+1).s.
//
// Entries are stored doubled so half-integers stay exact:  m -> 2m,
// k+1/2 -> 2k+1.  An "infinite" sequence is (pre, per) with per nonempty;
// a finite one (intermediate address) is just a list whose last doubled
// entry is odd.

#include <cstdint>
#include <vector>

namespace brute {

using Seq = std::vector<long long>;  // doubled entries

inline Seq expand(const Seq& pre, const Seq& per, int len) {
  Seq out;
  out.reserve(len);
  for (int i = 0; i < len; ++i) {
    if (i < (int)pre.size()) out.push_back(pre[i]);
    else out.push_back(per[(i - pre.size()) % per.size()]);
  }
  return out;
}

// -1 / 0 / +1. Finite inputs end at a half-integer entry, which can never
// equal an integer entry, so the loop decides before running off an end
// unless both end together with identical entries.
inline int compare(const Seq& a, const Seq& b) {
  size_t n = a.size() < b.size() ? a.size() : b.size();
  for (size_t i = 0; i < n; ++i) {
    if (a[i] < b[i]) return -1;
    if (a[i] > b[i]) return 1;
  }
  if (a.size() == b.size()) return 0;
  return a.size() < b.size() ? -1 : 1;  // unreachable for well-formed input
}

struct Symbol {
  bool boundary = false;
  long long k = 0;  // Plain{k}, or Boundary{k} meaning the pair k-1|k
  bool operator==(const Symbol& o) const {
    return boundary == o.boundary && k == o.k;
  }
};

// Kneading entries of the infinite sequence (pre, per), first `count` of
// them, each decided on expansions of length `depth`.
inline std::vector<Symbol> kneading(const Seq& pre, const Seq& per, int count,
                                    int depth = 256) {
  std::vector<Symbol> out;
  Seq s = expand(pre, per, depth + count + 2);
  long long lo = s[0], hi = s[0];
  for (long long v : s) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  lo = lo / 2 - 2;
  hi = hi / 2 + 2;
  for (int i = 1; i <= count; ++i) {
    Seq u(s.begin() + (i - 1), s.begin() + (i - 1) + depth);
    Symbol sym;
    bool found = false;
    for (long long k = lo; k <= hi && !found; ++k) {
      // k.s = [k, s...]
      Seq ks;
      ks.reserve(depth);
      ks.push_back(2 * k);
      for (int j = 0; j + 1 < depth; ++j) ks.push_back(s[j]);
      Seq k1s = ks;
      k1s[0] = 2 * (k + 1);
      int ck = compare(ks, u);
      if (ck == 0) {
        sym.boundary = true;
        sym.k = k;
        found = true;
      } else if (ck < 0 && compare(u, k1s) < 0) {
        sym.boundary = false;
        sym.k = k;
        found = true;
      }
    }
    out.push_back(sym);  // found is guaranteed within the scanned range
  }
  return out;
}

}  // namespace brute
