#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace stirlab {

inline constexpr std::string_view kToolVersion = "0.1.0";

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

/// Violated input contract (bad configuration, out-of-range parameter,
/// unsupported request).  The CLI maps this to exit code 2.
class PreconditionError : public std::runtime_error {
public:
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical check that was expected to hold did not.  The CLI maps
/// this to exit code 1 and the message names the failed invariant.
class CheckFailure : public std::runtime_error {
public:
  explicit CheckFailure(const std::string& what) : std::runtime_error(what) {}
};

/// FNV-1a 64-bit hash; stamps configurations into certificates.
constexpr std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (const char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace stirlab
