#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace riasec {

/// Input or configuration rejected before any work was done.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure while running a stage on inputs that passed validation.
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kDims = 6;

/// Holland's six interest dimensions in canonical order.
enum class Dim : int { R = 0, I, A, S, E, C };

inline constexpr std::array<Dim, kDims> kAllDims = {Dim::R, Dim::I, Dim::A,
                                                    Dim::S, Dim::E, Dim::C};

constexpr char dim_letter(Dim d) { return "RIASEC"[static_cast<int>(d)]; }
constexpr int index_of(Dim d) { return static_cast<int>(d); }

template <typename Scalar>
using Vec6 = Eigen::Matrix<Scalar, kDims, 1>;

/// Six interest scores, one per dimension in canonical order.
using RiasecProfile = Vec6<double>;

inline constexpr double kMinScore = 0.0;
inline constexpr double kMaxScore = 100.0;

inline bool profile_in_range(const RiasecProfile& y) {
  for (int d = 0; d < kDims; ++d) {
    if (!std::isfinite(y[d]) || y[d] < kMinScore || y[d] > kMaxScore) return false;
  }
  return true;
}

/// Highest-scored dimension; ties go to the earlier canonical dimension.
template <typename Derived>
Dim top_dimension(const Eigen::MatrixBase<Derived>& scores) {
  int best = 0;
  for (int d = 1; d < kDims; ++d) {
    if (scores[d] > scores[best]) best = d;
  }
  return static_cast<Dim>(best);
}

std::string format_profile(const RiasecProfile& y);

}  // namespace riasec
