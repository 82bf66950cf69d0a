#pragma once

#include <cmath>
#include <cstdint>

#include "souvlaki/error.hpp"

namespace souvlaki {

/// Constructive distance bound for the black-cut argument: with threshold
/// R = ceil(m * C^2) every cut of at most C^2 black edges has resistance at
/// least m, and s = R * C forces a black edge on every path.
inline std::int64_t constructive_s(double m, std::int64_t C) {
  if (C < 1) throw DomainError("C must be positive");
  if (m <= 0) return 1;
  double r = std::ceil(m * static_cast<double>(C) * static_cast<double>(C));
  double s = r * static_cast<double>(C);
  if (s > 9.0e18) throw DomainError("s bound overflows");
  return static_cast<std::int64_t>(s);
}

}  // namespace souvlaki
