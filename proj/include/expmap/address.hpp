#pragma once

// External addresses (eventually periodic integer sequences) and
// intermediate addresses (finite, ending in a half-integer), with exact
// lexicographic comparison and the textual syntax used by the CLI:
//
//   [p1,p2;q1,q2]   preperiod p1,p2 then period q1,q2 repeated forever
//   [s1,...,k+1/2]  intermediate address, only the last entry a half-integer
//
// Entries are compared through doubled integers (m -> 2m, k+1/2 -> 2k+1) so
// half-integers stay exact and sit strictly between their neighbors.

#include <cstdlib>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "common.hpp"

namespace expmap {

namespace detail {

// canonical form of an eventually periodic sequence: primitive period,
// then shortest preperiod (absorb a shared tail into a rotation)
template <class T>
inline void canonicalize_seq(std::vector<T>& pre, std::vector<T>& per) {
  for (size_t d = 1; d < per.size(); ++d) {
    if (per.size() % d != 0) continue;
    bool repeats = true;
    for (size_t i = d; i < per.size() && repeats; ++i)
      repeats = per[i] == per[i % d];
    if (repeats) {
      per.resize(d);
      break;
    }
  }
  while (!pre.empty() && pre.back() == per.back()) {
    per.insert(per.begin(), per.back());
    per.pop_back();
    pre.pop_back();
  }
}

}  // namespace detail

struct ExternalAddress {
  std::vector<long long> preperiod;
  std::vector<long long> period;  // nonempty; primitive once canonicalized

  void canonicalize() {
    require(!period.empty(), "external address: period must be nonempty");
    detail::canonicalize_seq(preperiod, period);
  }

  // s_{i+1} in 0-based indexing, defined for every i >= 0
  long long entry(size_t i) const {
    if (i < preperiod.size()) return preperiod[i];
    return period[(i - preperiod.size()) % period.size()];
  }
  long long doubled(size_t i) const { return 2 * entry(i); }

  bool periodic() const { return preperiod.empty(); }

  bool operator==(const ExternalAddress& o) const {
    return preperiod == o.preperiod && period == o.period;
  }
  bool operator!=(const ExternalAddress& o) const { return !(*this == o); }
};

inline ExternalAddress external_address(std::vector<long long> pre,
                                        std::vector<long long> per) {
  ExternalAddress s{std::move(pre), std::move(per)};
  s.canonicalize();
  return s;
}

inline ExternalAddress shift(const ExternalAddress& s) {
  ExternalAddress out = s;
  if (!out.preperiod.empty()) {
    out.preperiod.erase(out.preperiod.begin());
  } else {
    out.period.push_back(out.period.front());
    out.period.erase(out.period.begin());
  }
  out.canonicalize();
  return out;
}

struct IntermediateAddress {
  std::vector<long long> entries;  // s_1 .. s_{n-2}, integers
  long long half_k = 0;            // final entry is half_k + 1/2

  size_t length() const { return entries.size() + 1; }
  // doubled value at position i < length(); the last one is odd
  long long doubled(size_t i) const {
    require(i < length(), "intermediate address: index past the half entry");
    return i < entries.size() ? 2 * entries[i] : 2 * half_k + 1;
  }

  bool operator==(const IntermediateAddress& o) const {
    return entries == o.entries && half_k == o.half_k;
  }
  bool operator!=(const IntermediateAddress& o) const { return !(*this == o); }
};

enum class Ordering { Less = -1, Equal = 0, Greater = 1 };

inline Ordering lex_compare(const ExternalAddress& a,
                            const ExternalAddress& b) {
  size_t bound = a.preperiod.size() + b.preperiod.size() +
                 std::lcm(a.period.size(), b.period.size()) + 1;
  for (size_t i = 0; i < bound; ++i) {
    long long va = a.doubled(i), vb = b.doubled(i);
    if (va != vb) return va < vb ? Ordering::Less : Ordering::Greater;
  }
  return Ordering::Equal;
}

// A half-integer never equals any other entry, so a finite address decides
// the comparison at its last position at the latest.
inline Ordering lex_compare(const IntermediateAddress& a,
                            const ExternalAddress& b) {
  for (size_t i = 0; i < a.length(); ++i) {
    long long va = a.doubled(i), vb = b.doubled(i);
    if (va != vb) return va < vb ? Ordering::Less : Ordering::Greater;
  }
  return Ordering::Equal;  // unreachable: the half entry cannot tie
}

inline Ordering lex_compare(const ExternalAddress& a,
                            const IntermediateAddress& b) {
  Ordering o = lex_compare(b, a);
  if (o == Ordering::Less) return Ordering::Greater;
  if (o == Ordering::Greater) return Ordering::Less;
  return Ordering::Equal;
}

inline Ordering lex_compare(const IntermediateAddress& a,
                            const IntermediateAddress& b) {
  size_t n = a.length() < b.length() ? a.length() : b.length();
  for (size_t i = 0; i < n; ++i) {
    long long va = a.doubled(i), vb = b.doubled(i);
    if (va != vb) return va < vb ? Ordering::Less : Ordering::Greater;
  }
  return Ordering::Equal;  // identical entries imply identical length
}

using Address = std::variant<ExternalAddress, IntermediateAddress>;

inline Ordering lex_compare(const Address& a, const Address& b) {
  return std::visit([](const auto& x, const auto& y) { return lex_compare(x, y); },
                    a, b);
}

// ---- text form ----

namespace detail {

inline std::string join_entries(const std::vector<long long>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

inline bool parse_int(const std::string& tok, long long& out) {
  if (tok.empty()) return false;
  char* end = nullptr;
  errno = 0;
  long long v = std::strtoll(tok.c_str(), &end, 10);
  if (errno != 0 || end != tok.c_str() + tok.size()) return false;
  out = v;
  return true;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t p = s.find(sep, start);
    if (p == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, p - start));
    start = p + 1;
  }
}

}  // namespace detail

inline std::string to_string(const ExternalAddress& s) {
  return "[" + detail::join_entries(s.preperiod) + ";" +
         detail::join_entries(s.period) + "]";
}

inline std::string to_string(const IntermediateAddress& s) {
  std::string out = "[";
  for (long long e : s.entries) out += std::to_string(e) + ",";
  out += std::to_string(s.half_k) + "+1/2]";
  return out;
}

inline std::string to_string(const Address& a) {
  return std::visit([](const auto& x) { return to_string(x); }, a);
}

// Accepts the printed forms plus bare halves "1/2" and "-1/2" for the
// final entry of an intermediate address.
inline Address parse_address(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (c != ' ' && c != '\t') s += c;
  require(s.size() >= 2 && s.front() == '[' && s.back() == ']',
          "address: expected [...] syntax: " + raw);
  std::string body = s.substr(1, s.size() - 2);
  size_t semi = body.find(';');
  if (semi != std::string::npos) {
    std::string pre_part = body.substr(0, semi);
    std::string per_part = body.substr(semi + 1);
    require(!per_part.empty(), "address: period part is empty: " + raw);
    std::vector<long long> pre, per;
    if (!pre_part.empty()) {
      for (const auto& tok : detail::split(pre_part, ',')) {
        long long v;
        require(detail::parse_int(tok, v), "address: bad entry '" + tok + "'");
        pre.push_back(v);
      }
    }
    for (const auto& tok : detail::split(per_part, ',')) {
      long long v;
      require(detail::parse_int(tok, v), "address: bad entry '" + tok + "'");
      per.push_back(v);
    }
    return external_address(std::move(pre), std::move(per));
  }
  // no semicolon: intermediate address, last entry a half-integer
  auto toks = detail::split(body, ',');
  require(!toks.empty() && !toks.back().empty(),
          "address: empty intermediate form: " + raw);
  IntermediateAddress out;
  for (size_t i = 0; i + 1 < toks.size(); ++i) {
    long long v;
    require(detail::parse_int(toks[i], v),
            "address: bad entry '" + toks[i] + "'");
    out.entries.push_back(v);
  }
  std::string last = toks.back();
  if (last == "1/2") {
    out.half_k = 0;
  } else if (last == "-1/2") {
    out.half_k = -1;
  } else {
    size_t plus = last.rfind("+1/2");
    require(plus != std::string::npos && plus + 4 == last.size() && plus > 0,
            "address: external form needs ';', intermediate needs a "
            "half-integer last entry: " + raw);
    long long k = 0;
    require(detail::parse_int(last.substr(0, plus), k),
            "address: bad half entry '" + last + "'");
    out.half_k = k;
  }
  return out;
}

inline ExternalAddress parse_external(const std::string& raw) {
  Address a = parse_address(raw);
  auto* e = std::get_if<ExternalAddress>(&a);
  require(e != nullptr, "address: expected an external address: " + raw);
  return *e;
}

}  // namespace expmap
