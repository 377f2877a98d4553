#pragma once

// Built-in initial data families, scaled to H^4 norm eps (zero stays zero).

#include "kplab/spectral.hpp"

#include <cstdint>
#include <string>

namespace kplab {

enum class ProfileKind { Zero, Gaussian, Algebraic };

std::string profile_name(ProfileKind k);
ProfileKind parse_profile(const std::string& name);  // throws std::invalid_argument

struct ProfileSpec {
  ProfileKind kind = ProfileKind::Gaussian;
  double eps = 1e-3;
  double sigma_x = 1.0;
  double sigma_y = 1.0;
  std::uint64_t seed = 1;
};

/// Gaussian bump exp(-x^2/(2 sx^2) - y^2/(2 sy^2)) or the rough profile with
/// coefficients (1 + |k|^2)^-3 and seeded random phases, cut off at the
/// dealiasing radius. Returned at t = 0.
Field make_profile(GridPtr grid, const ProfileSpec& spec);

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
double unit_from_bits(std::uint64_t bits);

}  // namespace kplab
