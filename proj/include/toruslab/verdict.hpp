#pragma once

#include <string>
#include <vector>

namespace toruslab {

/// One evaluated inequality lhs <= rhs. slack = rhs - lhs; pass allows tol.
struct Verdict {
  std::string anchor;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool pass = false;
  double tol = 0.0;
};

inline Verdict upper_bound(std::string anchor, double lhs, double rhs, double tol = 0.0) {
  Verdict v;
  v.anchor = std::move(anchor);
  v.lhs = lhs;
  v.rhs = rhs;
  v.slack = rhs - lhs;
  v.tol = tol;
  v.pass = lhs <= rhs + tol;
  return v;
}

inline bool all_pass(const std::vector<Verdict>& vs) {
  for (const auto& v : vs)
    if (!v.pass) return false;
  return true;
}

}  // namespace toruslab
