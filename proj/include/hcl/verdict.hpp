#pragma once

#include <string_view>

#include "hcl/linalg.hpp"

namespace hcl {

enum class MembershipClass { Interior, Boundary, Outside };

std::string_view to_string(MembershipClass c);

/// Result of a cone membership test. `margin` is the normalized minimal dual
/// pairing (or minus the largest root for polynomial cones); `witness` is the
/// polar element attaining it.
struct MembershipVerdict {
  MembershipClass cls = MembershipClass::Boundary;
  double margin = 0.0;
  SymMatrix witness;

  bool in_cone() const { return cls != MembershipClass::Outside; }
  bool interior() const { return cls == MembershipClass::Interior; }
};

/// Interior iff margin > tau, Outside iff margin < -tau, else Boundary.
inline MembershipClass classify_margin(double margin, double tau) {
  if (margin > tau) return MembershipClass::Interior;
  if (margin < -tau) return MembershipClass::Outside;
  return MembershipClass::Boundary;
}

}  // namespace hcl
