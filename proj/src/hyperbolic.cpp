#include "limitlab/hyperbolic.hpp"

#include <array>
#include <complex>

namespace limitlab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NotLoxodromic: return "NotLoxodromic";
    case ErrorCode::ConstructionFailed: return "ConstructionFailed";
    case ErrorCode::CirclesOverlap: return "CirclesOverlap";
    case ErrorCode::DepthExceeded: return "DepthExceeded";
    case ErrorCode::ToleranceCollision: return "ToleranceCollision";
    case ErrorCode::UnknownCharacter: return "UnknownCharacter";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::EmptyCloud: return "EmptyCloud";
    case ErrorCode::ReductionStalled: return "ReductionStalled";
    case ErrorCode::NotNormalSpec: return "NotNormalSpec";
    case ErrorCode::WitnessTrivial: return "WitnessTrivial";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::InvalidLength: return "InvalidLength";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::SideAmbiguous: return "SideAmbiguous";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

std::string_view to_string(IsometryKind kind) {
  switch (kind) {
    case IsometryKind::identity: return "identity";
    case IsometryKind::loxodromic: return "loxodromic";
    case IsometryKind::parabolic: return "parabolic";
    case IsometryKind::elliptic: return "elliptic";
  }
  return "unknown";
}

std::string_view to_string(CrossingKind kind) {
  switch (kind) {
    case CrossingKind::disjoint: return "disjoint";
    case CrossingKind::cross: return "cross";
    case CrossingKind::share_endpoint: return "share-endpoint";
  }
  return "unknown";
}

CrossingKind geodesics_cross_angles(double g_from, double g_to, double h_from, double h_to) {
  const std::array<double, 2> g{g_from, g_to};
  const std::array<double, 2> h{h_from, h_to};
  for (double p : g) {
    for (double q : h) {
      if (angular_distance(p, q) <= kBoundaryTolerance) return CrossingKind::share_endpoint;
    }
  }
  const double span = wrap_angle(g_to - g_from);
  const bool first = wrap_angle(h_from - g_from) < span;
  const bool second = wrap_angle(h_to - g_from) < span;
  return first != second ? CrossingKind::cross : CrossingKind::disjoint;
}

DiscCircle isometric_circle(const Mobius<double>& m) {
  const std::complex<double> alpha((m.a() + m.d()) / 2.0, (m.b() - m.c()) / 2.0);
  const std::complex<double> beta((m.a() - m.d()) / 2.0, -(m.b() + m.c()) / 2.0);
  if (std::abs(beta) < kSignTolerance) {
    throw Error(ErrorCode::InvalidInput, "map fixes the disc origin; no isometric circle");
  }
  const std::complex<double> center = -std::conj(alpha / beta);
  return {center.real(), center.imag(), 1.0 / std::abs(beta)};
}

}  // namespace limitlab
