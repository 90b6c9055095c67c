#include "roughcadlag/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "roughcadlag/errors.hpp"
#include "roughcadlag/pvar.hpp"

namespace roughcadlag {

// --- Rng ---

double Rng::uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::exponential(double rate) { return -std::log(uniform()) / rate; }

// --- models ---

std::string to_string(Model model) {
  switch (model) {
    case Model::kBrownian: return "brownian";
    case Model::kCompoundPoisson: return "compound_poisson";
    case Model::kItoSemimartingale: return "ito_semimartingale";
    case Model::kFbm: return "fbm";
    case Model::kFvStaircase: return "fv_staircase";
  }
  return "unknown";
}

Model parse_model(std::string_view name) {
  if (name == "brownian") return Model::kBrownian;
  if (name == "compound_poisson") return Model::kCompoundPoisson;
  if (name == "ito_semimartingale") return Model::kItoSemimartingale;
  if (name == "fbm") return Model::kFbm;
  if (name == "fv_staircase") return Model::kFvStaircase;
  throw DomainError("unknown model '" + std::string(name) + "'");
}

void GeneratorSpec::validate() const {
  if (d < 1) throw DomainError("generator: d must be >= 1");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("generator: T must be > 0");
  if (steps < 2) throw DomainError("generator: steps must be >= 2");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("generator: lambda must be >= 0");
  if (!(jump_std >= 0.0) || !std::isfinite(jump_std) || !std::isfinite(jump_mean))
    throw DomainError("generator: jump distribution must be finite with std >= 0");
  if (!(hurst >= 0.5 && hurst < 1.0)) throw DomainError("generator: hurst must lie in [0.5, 1)");
  if (!(q >= 1.0 && q < 2.0)) throw DomainError("generator: q must lie in [1, 2)");
  if (!std::isfinite(fv_scale)) throw DomainError("generator: fv_scale must be finite");
  const auto dd = static_cast<Eigen::Index>(d);
  if (x0 && (x0->size() != dd || !x0->allFinite()))
    throw DomainError("generator: x0 must be a finite d-vector");
  if (drift && (drift->size() != dd || !drift->allFinite()))
    throw DomainError("generator: drift must be a finite d-vector");
  if (volatility &&
      (volatility->rows() != dd || volatility->cols() != dd || !volatility->allFinite()))
    throw DomainError("generator: volatility must be a finite d x d matrix");
  if (model == Model::kFbm && steps > kFbmMaxSteps)
    throw SizeError("generator: fbm is limited to " + std::to_string(kFbmMaxSteps) +
                    " steps (dense Cholesky)");
}

namespace {

std::vector<double> uniform_grid(const GeneratorSpec& spec) {
  std::vector<double> times(spec.steps);
  for (std::size_t i = 0; i < spec.steps; ++i)
    times[i] = spec.horizon * static_cast<double>(i) / static_cast<double>(spec.steps);
  return times;
}

Vector start_value(const GeneratorSpec& spec) {
  return spec.x0.value_or(Vector::Zero(static_cast<Eigen::Index>(spec.d)));
}

/// Draws normals for `count` steps per component, component-major.
RowMatrix draw_normals(Rng& rng, std::size_t count, std::size_t d) {
  RowMatrix z(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < count; ++i)
      z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rng.normal();
  return z;
}

CadlagPath brownian(const GeneratorSpec& spec, Rng& rng) {
  const std::vector<double> times = uniform_grid(spec);
  const double dt = spec.horizon / static_cast<double>(spec.steps);
  const RowMatrix z = draw_normals(rng, spec.steps - 1, spec.d);
  RowMatrix values(static_cast<Eigen::Index>(spec.steps), static_cast<Eigen::Index>(spec.d));
  values.row(0) = start_value(spec).transpose();
  const double sd = std::sqrt(dt);
  for (Eigen::Index i = 1; i < values.rows(); ++i) values.row(i) = values.row(i - 1) + sd * z.row(i - 1);
  return {times, std::move(values), spec.horizon};
}

/// Jump-diffusion on the uniform grid with the jump times inserted.
CadlagPath jump_diffusion(const GeneratorSpec& spec, Rng& rng, bool diffusion) {
  std::vector<double> arrivals;
  if (spec.lambda > 0.0) {
    double t = 0.0;
    while (true) {
      t += rng.exponential(spec.lambda);
      if (t > spec.horizon) break;
      arrivals.push_back(t);
    }
  }
  RowMatrix sizes(static_cast<Eigen::Index>(arrivals.size()), static_cast<Eigen::Index>(spec.d));
  for (std::size_t j = 0; j < spec.d; ++j)
    for (std::size_t k = 0; k < arrivals.size(); ++k)
      sizes(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
          spec.jump_mean + spec.jump_std * rng.normal();

  std::vector<double> times = uniform_grid(spec);
  times.insert(times.end(), arrivals.begin(), arrivals.end());
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  const auto m = static_cast<Eigen::Index>(times.size());
  const auto d = static_cast<Eigen::Index>(spec.d);
  RowMatrix values(m, d);
  values.row(0) = start_value(spec).transpose();

  RowMatrix z;
  if (diffusion) z = draw_normals(rng, times.size() - 1, spec.d);
  const Vector drift = spec.drift.value_or(Vector::Zero(d));
  const Matrix vol = spec.volatility.value_or(Matrix::Identity(d, d));

  std::size_t next_jump = 0;
  for (Eigen::Index i = 1; i < m; ++i) {
    Vector step = Vector::Zero(d);
    const auto ui = static_cast<std::size_t>(i);
    if (diffusion) {
      const double dt = times[ui] - times[ui - 1];
      step += drift * dt + std::sqrt(dt) * (vol * z.row(i - 1).transpose());
    }
    while (next_jump < arrivals.size() && arrivals[next_jump] == times[ui]) {
      step += sizes.row(static_cast<Eigen::Index>(next_jump)).transpose();
      ++next_jump;
    }
    values.row(i) = values.row(i - 1) + step.transpose();
  }
  return {std::move(times), std::move(values), spec.horizon};
}

CadlagPath fbm(const GeneratorSpec& spec, Rng& rng) {
  const std::vector<double> times = uniform_grid(spec);
  const std::vector<double> interior(times.begin() + 1, times.end());
  const Matrix gram = CovarianceKernel::fbm(spec.hurst).gram(interior);
  const Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success)
    throw DomainError("generator: fbm grid covariance is not numerically positive definite");
  const Matrix factor = llt.matrixL();
  const RowMatrix z = draw_normals(rng, interior.size(), spec.d);
  RowMatrix values(static_cast<Eigen::Index>(spec.steps), static_cast<Eigen::Index>(spec.d));
  const Vector start = start_value(spec);
  values.row(0) = start.transpose();
  const Matrix correlated = factor * z;
  for (Eigen::Index i = 1; i < values.rows(); ++i)
    values.row(i) = start.transpose() + correlated.row(i - 1);
  return {times, std::move(values), spec.horizon};
}

CadlagPath fv_staircase(const GeneratorSpec& spec, Rng& rng) {
  const std::vector<double> times = uniform_grid(spec);
  RowMatrix signs(static_cast<Eigen::Index>(spec.steps - 1), static_cast<Eigen::Index>(spec.d));
  for (std::size_t j = 0; j < spec.d; ++j)
    for (std::size_t k = 0; k + 1 < spec.steps; ++k)
      signs(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
          rng.uniform() < 0.5 ? -1.0 : 1.0;
  RowMatrix values(static_cast<Eigen::Index>(spec.steps), static_cast<Eigen::Index>(spec.d));
  values.row(0) = start_value(spec).transpose();
  for (Eigen::Index i = 1; i < values.rows(); ++i) {
    const double k = static_cast<double>(i);
    const double lg = std::log2(k + 1.0);
    const double size = spec.fv_scale * std::pow(k * lg * lg, -1.0 / spec.q);
    values.row(i) = values.row(i - 1) + size * signs.row(i - 1);
  }
  return {times, std::move(values), spec.horizon};
}

}  // namespace

CadlagPath generate(const GeneratorSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  switch (spec.model) {
    case Model::kBrownian: return brownian(spec, rng);
    case Model::kCompoundPoisson: return jump_diffusion(spec, rng, false);
    case Model::kItoSemimartingale: return jump_diffusion(spec, rng, true);
    case Model::kFbm: return fbm(spec, rng);
    case Model::kFvStaircase: return fv_staircase(spec, rng);
  }
  throw DomainError("generator: unknown model");
}

// --- covariance ---

CovarianceKernel::CovarianceKernel(std::string tag, std::function<double(double, double)> fn)
    : tag_(std::move(tag)), fn_(std::move(fn)) {
  if (!fn_) throw DomainError("covariance kernel needs an evaluator");
}

CovarianceKernel CovarianceKernel::brownian() {
  return {"brownian", [](double s, double u) { return std::min(s, u); }};
}

CovarianceKernel CovarianceKernel::fbm(double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("fbm kernel: hurst must lie in (0, 1)");
  const double two_h = 2.0 * hurst;
  return {"fbm", [two_h](double s, double u) {
            return 0.5 * (std::pow(s, two_h) + std::pow(u, two_h) -
                          std::pow(std::abs(s - u), two_h));
          }};
}

double CovarianceKernel::rectangle(double s, double t, double u, double v) const {
  return fn_(t, v) - fn_(t, u) - fn_(s, v) + fn_(s, u);
}

Matrix CovarianceKernel::gram(std::span<const double> grid) const {
  const auto n = static_cast<Eigen::Index>(grid.size());
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = fn_(grid[static_cast<std::size_t>(i)], grid[static_cast<std::size_t>(j)]);
      g(i, j) = v;
      g(j, i) = v;
    }
  return g;
}

double min_eigenvalue(const CovarianceKernel& kernel, std::span<const double> grid) {
  const Eigen::SelfAdjointEigenSolver<Matrix> solver(kernel.gram(grid),
                                                    Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

namespace {

void require_covariance_grid(std::span<const double> grid, double q, std::size_t limit) {
  if (!(q >= 1.0) || !std::isfinite(q)) throw DomainError("covariance variation: q must be >= 1");
  if (grid.size() < 2) throw DomainError("covariance variation: grid needs two points");
  if (grid.size() > limit)
    throw SizeError("covariance variation: grid of " + std::to_string(grid.size()) +
                    " points exceeds " + std::to_string(limit));
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw DomainError("covariance variation: grid must be strictly increasing");
}

/// |rectangle|^q between grid cells, from a cached Gram table.
class RectangleTable {
 public:
  RectangleTable(const CovarianceKernel& kernel, double q, std::span<const double> grid)
      : q_(q), gram_(kernel.gram(grid)) {}

  double operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
    const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
    const auto c = static_cast<Eigen::Index>(k), e = static_cast<Eigen::Index>(l);
    const double r = gram_(b, e) - gram_(b, c) - gram_(a, e) + gram_(a, c);
    return std::pow(std::abs(r), q_);
  }

  /// Row partition maximizing the sum against fixed column cells.
  detail::PartitionDp best_rows(std::size_t n, const std::vector<std::size_t>& cols) const {
    return detail::partition_dp(n, [&](std::size_t i, std::size_t j) {
      double sum = 0.0;
      for (std::size_t k = 0; k + 1 < cols.size(); ++k) sum += (*this)(i, j, cols[k], cols[k + 1]);
      return sum;
    });
  }

  double sum(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) const {
    double total = 0.0;
    for (std::size_t a = 0; a + 1 < rows.size(); ++a)
      for (std::size_t b = 0; b + 1 < cols.size(); ++b)
        total += (*this)(rows[a], rows[a + 1], cols[b], cols[b + 1]);
    return total;
  }

 private:
  double q_;
  Matrix gram_;
};

std::vector<std::size_t> subset_from_mask(std::uint64_t mask, std::size_t n) {
  std::vector<std::size_t> out{0};
  for (std::size_t k = 0; k + 2 < n; ++k)
    if (mask & (std::uint64_t{1} << k)) out.push_back(k + 1);
  out.push_back(n - 1);
  return out;
}

CovarianceVariation finish(double raw, double q, std::span<const double> grid,
                           const std::vector<std::size_t>& rows,
                           const std::vector<std::size_t>& cols, bool exact) {
  CovarianceVariation out;
  out.raw_sup = raw;
  out.value = std::pow(raw, 1.0 / q);
  for (std::size_t i : rows) out.rows.push_back(grid[i]);
  for (std::size_t i : cols) out.cols.push_back(grid[i]);
  out.exact = exact;
  return out;
}

}  // namespace

double covariance_partition_sum(const CovarianceKernel& kernel, double q,
                                std::span<const double> rows, std::span<const double> cols) {
  if (rows.size() < 2 || cols.size() < 2)
    throw DomainError("covariance_partition_sum: partitions need two points");
  double total = 0.0;
  for (std::size_t a = 0; a + 1 < rows.size(); ++a)
    for (std::size_t b = 0; b + 1 < cols.size(); ++b)
      total += std::pow(
          std::abs(kernel.rectangle(rows[a], rows[a + 1], cols[b], cols[b + 1])), q);
  return total;
}

CovarianceVariation covariance_2d_variation(const CovarianceKernel& kernel, double q,
                                            std::span<const double> grid) {
  require_covariance_grid(grid, q, kCovarianceMaxGrid);
  const std::size_t n = grid.size();
  const RectangleTable table(kernel, q, grid);

  if (n <= kCovarianceExactGrid) {
    double best = -1.0;
    std::vector<std::size_t> best_rows;
    std::vector<std::size_t> best_cols;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (n - 2)); ++mask) {
      const std::vector<std::size_t> cols = subset_from_mask(mask, n);
      const detail::PartitionDp dp = table.best_rows(n, cols);
      if (dp.best.back() > best) {
        best = dp.best.back();
        best_rows = dp.chain(n - 1);
        best_cols = cols;
      }
    }
    return finish(best, q, grid, best_rows, best_cols, true);
  }

  std::vector<std::size_t> finest(n);
  for (std::size_t i = 0; i < n; ++i) finest[i] = i;
  const std::vector<std::vector<std::size_t>> starts{{0, n - 1}, finest};
  double best = -1.0;
  std::vector<std::size_t> best_rows;
  std::vector<std::size_t> best_cols;
  for (const auto& start : starts) {
    std::vector<std::size_t> cols = start;
    std::vector<std::size_t> rows;
    double value = -1.0;
    // Each half-step solves one axis exactly, so the objective never decreases.
    for (int iter = 0; iter < 100; ++iter) {
      rows = table.best_rows(n, cols).chain(n - 1);
      cols = table.best_rows(n, rows).chain(n - 1);
      const double next = table.sum(rows, cols);
      if (!(next > value)) {
        value = std::max(value, next);
        break;
      }
      value = next;
    }
    if (value > best) {
      best = value;
      best_rows = rows;
      best_cols = cols;
    }
  }
  return finish(best, q, grid, best_rows, best_cols, false);
}

CovarianceVariation brute_force_covariance_variation(const CovarianceKernel& kernel, double q,
                                                     std::span<const double> grid) {
  require_covariance_grid(grid, q, 10);
  const std::size_t n = grid.size();
  const std::uint64_t count = std::uint64_t{1} << (n - 2);
  std::vector<std::vector<std::size_t>> partitions;
  for (std::uint64_t mask = 0; mask < count; ++mask) partitions.push_back(subset_from_mask(mask, n));
  double best = -1.0;
  std::size_t best_r = 0;
  std::size_t best_c = 0;
  for (std::size_t r = 0; r < partitions.size(); ++r)
    for (std::size_t c = 0; c < partitions.size(); ++c) {
      double total = 0.0;
      const auto& rows = partitions[r];
      const auto& cols = partitions[c];
      for (std::size_t a = 0; a + 1 < rows.size(); ++a)
        for (std::size_t b = 0; b + 1 < cols.size(); ++b)
          total += std::pow(std::abs(kernel.rectangle(grid[rows[a]], grid[rows[a + 1]],
                                                      grid[cols[b]], grid[cols[b + 1]])),
                            q);
      if (total > best) {
        best = total;
        best_r = r;
        best_c = c;
      }
    }
  return finish(best, q, grid, partitions[best_r], partitions[best_c], true);
}

}  // namespace roughcadlag
