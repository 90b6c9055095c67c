#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "roughcadlag/paths.hpp"

namespace roughcadlag {

/// Deterministic random stream: std::mt19937_64 (fully specified by the
/// standard) with explicit transforms, so outputs are identical across
/// platforms and standard libraries.
///   uniform:     ((bits >> 11) + 0.5) * 2^-53, in the open interval (0, 1)
///   normal:      Box-Muller cosine branch, two uniforms per draw
///   exponential: -log(uniform) / rate
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();
  double normal();
  double exponential(double rate);

 private:
  std::mt19937_64 engine_;
};

enum class Model { kBrownian, kCompoundPoisson, kItoSemimartingale, kFbm, kFvStaircase };

std::string to_string(Model model);
/// Accepts brownian, compound_poisson, ito_semimartingale, fbm, fv_staircase.
Model parse_model(std::string_view name);

/// Parameters for `generate`. Samples sit at i T / steps, i = 0..steps-1
/// (plus jump times for the jump models); the path is constant on the last
/// cell up to T.
struct GeneratorSpec {
  Model model = Model::kBrownian;
  std::size_t d = 1;
  double horizon = 1.0;
  std::size_t steps = 1024;
  std::uint64_t seed = 0;
  std::optional<Vector> x0;          ///< default 0
  std::optional<Vector> drift;       ///< ito_semimartingale; default 0
  std::optional<Matrix> volatility;  ///< ito_semimartingale; default identity
  double lambda = 0.0;               ///< jump intensity
  double jump_mean = 0.0;            ///< per-component normal jump sizes
  double jump_std = 1.0;
  double hurst = 0.5;                ///< fbm, in [0.5, 1)
  double q = 1.5;                    ///< fv_staircase variation class, in [1, 2)
  double fv_scale = 0.25;            ///< fv_staircase jump scale

  /// Throws DomainError / SizeError.
  void validate() const;
};

inline constexpr std::size_t kFbmMaxSteps = 4096;

/// Staircase sample path for `spec`. Random draws are consumed in a fixed
/// order, component-major then time-major within each block:
///   brownian           normals (steps - 1 per component)
///   compound_poisson   arrival gaps, then jump sizes (component-major)
///   ito_semimartingale arrival gaps, jump sizes, then diffusion normals
///   fbm                normals (steps - 1 per component), times the
///                      Cholesky factor of the grid covariance
///   fv_staircase       signs; increment k is scale * sign * (k log2(k+1)^2)^(-1/q),
///                      so sum_k |increment|^q stays bounded in the number of steps
CadlagPath generate(const GeneratorSpec& spec);

/// Covariance function (s, u) -> E[X_s X_u] of one component.
class CovarianceKernel {
 public:
  CovarianceKernel(std::string tag, std::function<double(double, double)> fn);

  static CovarianceKernel brownian();
  /// (1/2)(s^{2H} + u^{2H} - |s - u|^{2H}).
  static CovarianceKernel fbm(double hurst);

  const std::string& tag() const noexcept { return tag_; }
  double operator()(double s, double u) const { return fn_(s, u); }
  /// E[X_{s,t} X_{u,v}].
  double rectangle(double s, double t, double u, double v) const;
  Matrix gram(std::span<const double> grid) const;

 private:
  std::string tag_;
  std::function<double(double, double)> fn_;
};

/// Smallest eigenvalue of the Gram matrix on `grid`.
double min_eigenvalue(const CovarianceKernel& kernel, std::span<const double> grid);

struct CovarianceVariation {
  double raw_sup = 0.0;  ///< sup over grid partitions P, P' of sum |E[X_{s,t} X_{u,v}]|^q
  double value = 0.0;    ///< raw_sup^(1/q)
  std::vector<double> rows;
  std::vector<double> cols;
  bool exact = false;    ///< true when every partition pair was covered
};

inline constexpr std::size_t kCovarianceMaxGrid = 64;
inline constexpr std::size_t kCovarianceExactGrid = 12;

/// Sum over [s,t] in rows, [u,v] in cols of |E[X_{s,t} X_{u,v}]|^q.
double covariance_partition_sum(const CovarianceKernel& kernel, double q,
                                std::span<const double> rows, std::span<const double> cols);

/// Grid-restricted two-dimensional q-variation of the covariance.
/// Up to kCovarianceExactGrid points every column partition is enumerated and
/// the row partition is solved by dynamic programming (exact). Larger grids
/// (up to kCovarianceMaxGrid) use alternating row/column dynamic programming
/// from several starts, which yields a lower bound. Either way the result is a
/// lower bound for the sup over all partitions of [0, T].
CovarianceVariation covariance_2d_variation(const CovarianceKernel& kernel, double q,
                                            std::span<const double> grid);

/// Test oracle: both partitions enumerated. Grid of at most 10 points.
CovarianceVariation brute_force_covariance_variation(const CovarianceKernel& kernel, double q,
                                                     std::span<const double> grid);

}  // namespace roughcadlag
