#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "roughcadlag/dyadic.hpp"
#include "roughcadlag/paths.hpp"
#include "roughcadlag/pvar.hpp"

namespace roughcadlag {

/// Decomposition of the left-point integral of Z = X + Y along Z's schedule,
/// evaluated at T: int Z_- dZ = xx + xy + yx + yy.
struct CrossTerms {
  Matrix xx, xy, yx, yy;
};

/// How a lift was built.
struct LiftMeta {
  std::string method;  ///< "ito", "gaussian", "young", "perturbed"
  int level = -1;      ///< dyadic level of I; -1 means the full-grid left-point sum
  double gap = 0.0;    ///< sup_t |I^level - I^(level+1)|_F
  double tol = 0.0;
  bool stabilized = true;
  bool geometric_diagonal = false;  ///< diagonal of the area is (1/2)(X^i_{s,t})^2
  std::optional<CrossTerms> cross_terms;
  std::map<std::string, std::string> source;  ///< free-form provenance (model, seed, ...)
};

/// A path X with an additive integral path I on the same grid. The second
/// level is always derived:
///
///   area(s, t) = I_t - I_s - X_s ⊗ X_{s,t},
///
/// so Chen's relation holds by construction. When `geometric_diagonal` is set
/// the diagonal entries are (1/2)(X^i_{s,t})^2 instead.
class RoughLift {
 public:
  RoughLift(CadlagPath path, MatrixPath integral, double p, LiftMeta meta);

  const CadlagPath& path() const noexcept { return path_; }
  const MatrixPath& integral() const noexcept { return integral_; }
  double p() const noexcept { return p_; }
  const LiftMeta& meta() const noexcept { return meta_; }
  std::size_t dim() const noexcept { return path_.dim(); }
  double horizon() const noexcept { return path_.horizon(); }

  Vector increment(double s, double t) const;
  /// Second level on sample indices i <= j.
  Matrix area_at(std::size_t i, std::size_t j) const;
  /// Second level for 0 <= s <= t <= T.
  Matrix area(double s, double t) const;
  TwoParamTensor area_tensor() const;

  /// 1 + |X|_inf^2 + |I|_inf, the reference magnitude for relative checks.
  double scale() const;

 private:
  CadlagPath path_;
  MatrixPath integral_;
  double p_;
  LiftMeta meta_;
};

struct LiftOptions {
  int n_min = 0;
  int n_max = 32;
  std::optional<double> tol;  ///< default 1e-6 (1 + |X|_inf^2)
  bool strict = false;        ///< throw ConvergenceError when not stabilized
  double p = 2.5;
};

/// Itô lift: I = dyadic_integral_path at the smallest level n in
/// [n_min, n_max) whose sup-gap to level n + 1 is within tol; falls back to
/// n_max (meta.stabilized = false) unless strict.
RoughLift ito_lift(const CadlagPath& path, const LiftOptions& options = {});

/// Gaussian lift: off-diagonal entries as in ito_lift, diagonal fixed to
/// (1/2)(X^i_{s,t})^2. Independence of components is the caller's claim.
RoughLift gaussian_lift(const CadlagPath& path, const LiftOptions& options = {});

/// Exact left-point jump sum of a staircase of finite q-variation,
/// q in [1, 2).
MatrixPath young_integral(const CadlagPath& path, double q);
RoughLift young_lift(const CadlagPath& path, double q, double p = 2.5);

/// Lift of Z = X + Y with Y of finite q-variation, q in [1, 2). Built like
/// ito_lift on Z; meta.cross_terms carries the four-way split at T.
RoughLift perturbed_lift(const CadlagPath& x, const CadlagPath& y, double q,
                         const LiftOptions& options = {});

/// Grid-restricted p/2-variation of the area over partitions drawn from the
/// sample times (T appended when it is not a sample). Same dynamic program
/// as two_param_variation, without the per-entry allocations.
VariationResult area_variation(const RoughLift& lift);

/// |W_{s,t} - W_{s,u} - W_{u,t} - X_{s,u} ⊗ X_{u,t}|_F for s <= u <= t.
double chen_defect(const RoughLift& lift, double s, double u, double t);
double chen_defect(const CadlagPath& path, const TwoParamTensor& area, double s, double u,
                   double t);

/// Quadratic covariation along the level-n schedule, sampled at the stopping
/// times and at T.
struct BracketPath {
  int level = 0;
  MatrixPath values;
};

BracketPath bracket(const CadlagPath& path, int level);

/// |Sym(2 W_{s,t}) + ([X]_t - [X]_s) - X_{s,t} ⊗ X_{s,t}|_F with the bracket
/// taken along the level-n schedule (n < 0: every sample interval).
/// Vanishes up to rounding for Itô lifts at their own level.
double ito_symmetry_defect(const RoughLift& lift, int level, double s, double t);
/// Uses the lift's own level.
double ito_symmetry_defect(const RoughLift& lift, double s, double t);

/// ito_symmetry_defect at sample-index pairs (i, j), i <= j, building the
/// bracket once. With drop_bracket_diagonal the bracket's diagonal is left
/// out, which is the identity a geometric diagonal satisfies.
std::vector<double> ito_symmetry_defects(
    const RoughLift& lift, int level, std::span<const std::pair<std::size_t, std::size_t>> pairs,
    bool drop_bracket_diagonal = false);

}  // namespace roughcadlag
