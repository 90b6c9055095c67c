// Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero when any
// criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "roughcadlag/cli.hpp"
#include "roughcadlag/dyadic.hpp"
#include "roughcadlag/extension.hpp"
#include "roughcadlag/lift.hpp"
#include "roughcadlag/pvar.hpp"
#include "roughcadlag/simulate.hpp"

namespace fs = std::filesystem;
using namespace roughcadlag;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const Model kModels[] = {Model::kBrownian, Model::kCompoundPoisson, Model::kItoSemimartingale,
                         Model::kFbm, Model::kFvStaircase};

CadlagPath simulate(Model model, std::uint64_t seed, std::size_t steps, std::size_t d = 2,
                    double hurst = 0.75) {
  GeneratorSpec spec;
  spec.model = model;
  spec.d = d;
  spec.steps = steps;
  spec.seed = seed;
  spec.lambda = 8.0;
  spec.hurst = hurst;
  return generate(spec);
}

/// Pairs (i, j), i <= j, of sample indices drawn uniformly.
std::vector<std::pair<std::size_t, std::size_t>> random_pairs(std::mt19937_64& rng, std::size_t n,
                                                              std::size_t count) {
  std::uniform_int_distribution<std::size_t> idx(0, n - 1);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t a = idx(rng), b = idx(rng);
    if (a > b) std::swap(a, b);
    out.emplace_back(a, b);
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> all_pairs(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) out.emplace_back(i, j);
  return out;
}

// 1. p_variation against exhaustive enumeration.
Outcome oracle_equality() {
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<std::size_t> size(1, 12), dim(1, 3);
  const double ps[] = {1.0, 1.5, 2.0, 2.5, 2.9};
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const CadlagPath x = oracle::random_path(rng, size(rng), dim(rng));
    for (double p : ps) {
      const double expected = oracle::pvar_raw(x, p);
      const VariationResult dp = p_variation(x, p);
      const double rel = std::abs(dp.raw_sup - expected) / std::max(1e-300, std::abs(expected));
      worst = std::max(worst, expected == 0.0 ? std::abs(dp.raw_sup) : rel);
    }
  }
  return {worst <= 1e-12, "5000 cases, max relative gap " + fmt("%.3g", worst)};
}

// 2. Chen's relation for every construction method.
Outcome chen_relation() {
  std::mt19937_64 rng(1002);
  double worst = 0.0;
  int lifts = 0;
  for (Model model : kModels) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const CadlagPath x = simulate(model, seed, 1024);
      std::vector<RoughLift> built{ito_lift(x)};
      if (model == Model::kFbm || model == Model::kBrownian) built.push_back(gaussian_lift(x));
      if (model == Model::kFvStaircase) built.push_back(young_lift(x, 1.5));
      if (model == Model::kBrownian)
        built.push_back(perturbed_lift(x, simulate(Model::kFvStaircase, seed + 100, 1024), 1.5));
      for (const RoughLift& lift : built) {
        ++lifts;
        const std::vector<double> g = oracle::grid(lift.path());
        std::uniform_int_distribution<std::size_t> idx(0, g.size() - 1);
        for (int k = 0; k < 1000; ++k) {
          std::size_t a[3] = {idx(rng), idx(rng), idx(rng)};
          std::sort(a, a + 3);
          const double defect = chen_defect(lift, g[a[0]], g[a[1]], g[a[2]]);
          worst = std::max(worst, defect / lift.scale());
        }
      }
    }
  }
  return {worst <= 1e-10,
          std::to_string(lifts) + " lifts, max residual/scale " + fmt("%.3g", worst)};
}

// 3. sup |X^n - X_-| <= 2^-n.
Outcome approximation_bound() {
  double worst_ratio = 0.0;
  double worst_mismatch = 0.0;
  for (Model model : kModels) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const CadlagPath x = simulate(model, seed, 1024);
      for (int n = 0; n <= 12; ++n) {
        const double measured = oracle::approximation_error(x, n);
        worst_mismatch = std::max(worst_mismatch, std::abs(measured - approximation_error(x, n)));
        worst_ratio = std::max(worst_ratio, measured / std::ldexp(1.0, -n));
      }
    }
  }
  return {worst_ratio <= 1.0 && worst_mismatch == 0.0,
          "max error * 2^n = " + fmt("%.4f", worst_ratio) +
              ", library vs oracle gap " + fmt("%.3g", worst_mismatch)};
}

// 4. Rate fit on brownian staircases.
Outcome rate_condition() {
  const int seeds = 50;
  int good = 0;
  double median_slope = 0.0;
  std::vector<double> slopes;
  for (int s = 0; s < seeds; ++s) {
    const CadlagPath x = simulate(Model::kBrownian, static_cast<std::uint64_t>(s), 1 << 16);
    const MatrixPath ref = dyadic_integral_path(x, 12);
    const RateFit fit = fit_rate(
        x, [&](double t) { return ref.eval(t); }, default_check_times(1.0), 3, 10);
    slopes.push_back(fit.slope);
    good += fit.slope <= -0.75 && fit.r_squared >= 0.9;
  }
  std::sort(slopes.begin(), slopes.end());
  median_slope = slopes[slopes.size() / 2];
  return {good >= 45, std::to_string(good) + "/50 seeds with slope <= -0.75 and r2 >= 0.9, median slope " +
                          fmt("%.3f", median_slope)};
}

double max_ibp(const RoughLift& lift, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  const std::vector<double> d = ito_symmetry_defects(lift, lift.meta().level, pairs);
  return *std::max_element(d.begin(), d.end()) / lift.scale();
}

// 5. Sym(2 W) + bracket - X ⊗ X = 0.
Outcome ito_correction() {
  std::mt19937_64 rng(1005);
  double pure = 0.0;
  double oracle_gap = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const CadlagPath x = oracle::random_path(rng, 2 + trial % 20, 1 + trial % 3);
    // Saturated level: every nonzero increment crosses the threshold.
    double smallest = 1.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
      const double step = (x.value(i) - x.value(i - 1)).norm();
      if (step > 0.0) smallest = std::min(smallest, step);
    }
    const int n = static_cast<int>(std::ceil(-std::log2(smallest)));
    LiftMeta meta;
    meta.method = "ito";
    meta.level = n;
    const RoughLift lift(x, dyadic_integral_path(x, n), 2.5, meta);
    pure = std::max(pure, max_ibp(lift, all_pairs(x.size())));
    const double T = x.horizon();
    const Matrix i = oracle::dyadic_integral(x, n, T);
    const Vector x0 = x.value(0);
    const Vector dx = x.eval(T) - x0;
    const Matrix area = i - x0 * dx.transpose();
    const Matrix direct = area + area.transpose() + oracle::dyadic_bracket(x, n, T) - dx * dx.transpose();
    oracle_gap = std::max(oracle_gap, std::abs(direct.norm() - ito_symmetry_defect(lift, 0.0, T)));
  }
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CadlagPath x = simulate(Model::kCompoundPoisson, seed, 512);
    const RoughLift lift = ito_lift(x);
    pure = std::max(pure, max_ibp(lift, random_pairs(rng, x.size(), 1000)));
  }
  double stabilized = 0.0;
  for (Model model : {Model::kBrownian, Model::kItoSemimartingale, Model::kFbm}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const RoughLift lift = ito_lift(simulate(model, seed, 1024));
      stabilized = std::max(stabilized, max_ibp(lift, random_pairs(rng, lift.path().size(), 1000)));
    }
  }
  return {pure <= 1e-10 && stabilized <= 1e-10 && oracle_gap <= 1e-12,
          "pure-jump " + fmt("%.3g", pure) + ", stabilized lifts " + fmt("%.3g", stabilized) +
              " (relative), oracle gap " + fmt("%.3g", oracle_gap)};
}

// 6. Two-jump worked example.
Outcome two_jump_example() {
  const CadlagPath x = CadlagPath::scalar({0.0, 0.25, 0.5}, {0.0, 1.0, 3.0}, 1.0);
  const RoughLift lift = ito_lift(x);
  const double area = lift.area(0.0, 1.0)(0, 0);
  const double qv = bracket(x, lift.meta().level).values.eval(1.0)(0, 0);
  return {area == 2.0 && qv == 5.0,
          "area " + fmt("%.17g", area) + ", bracket " + fmt("%.17g", qv)};
}

// 7. Young regime.
Outcome young_regime() {
  bool ok = true;
  double worst_mesh_ratio = 0.0;
  for (int m : {10, 100, 1000, 10000}) {
    std::vector<double> times;
    for (int k = 0; k <= m; ++k) times.push_back(static_cast<double>(k) / m);
    const CadlagPath line = CadlagPath::scalar(times, times);
    const double err = std::abs(young_integral(line, 1.0).eval(1.0)(0, 0) - 0.5);
    worst_mesh_ratio = std::max(worst_mesh_ratio, err * m);
    ok &= err <= 1.0 / m;
  }
  const CadlagPath y = CadlagPath::scalar({0.0, 0.5, 1.0}, {0.0, 0.25, 1.0});
  double jump_err = std::abs(young_integral(y, 1.5).eval(1.0)(0, 0) - 0.1875);
  std::mt19937_64 rng(1007);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = u(rng), b = u(rng);
    const CadlagPath j = CadlagPath::scalar({0.0, 0.4}, {a, b}, 1.0);
    jump_err = std::max(jump_err, std::abs(young_integral(j, 1.0).eval(1.0)(0, 0) - a * (b - a)));
  }
  for (int trial = 0; trial < 100; ++trial) {
    const CadlagPath x = oracle::random_path(rng, 2 + trial % 10, 1 + trial % 3);
    const MatrixPath lp = young_integral(x, 1.5);
    for (double t : oracle::grid(x))
      jump_err = std::max(jump_err, (lp.eval(t) - oracle::left_point(x, t)).cwiseAbs().maxCoeff());
  }
  ok &= jump_err <= 1e-15;
  return {ok, "max |error| * m = " + fmt("%.3f", worst_mesh_ratio) + ", jump sums off by " +
                  fmt("%.3g", jump_err)};
}

// 8. Gaussian diagonal convention.
Outcome gaussian_diagonal() {
  std::size_t checked = 0, broken = 0;
  for (double hurst : {0.5, 0.75}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const CadlagPath x = simulate(Model::kFbm, seed, 256, 2, hurst);
      const RoughLift lift = gaussian_lift(x);
      const std::vector<double> g = oracle::grid(x);
      for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = i; j < g.size(); ++j) {
          const Matrix a = lift.area(g[i], g[j]);
          const Vector dx = x.increment(g[i], g[j]);
          for (Eigen::Index k = 0; k < dx.size(); ++k) {
            ++checked;
            broken += a(k, k) != 0.5 * (dx(k) * dx(k));
          }
        }
      }
    }
  }
  return {broken == 0, std::to_string(checked) + " diagonal entries, " + std::to_string(broken) +
                           " mismatches"};
}

// 9. Hölder reparametrization.
Outcome holder_reparametrization() {
  std::mt19937_64 rng(1009);
  std::uniform_int_distribution<std::size_t> size(2, 50), dim(1, 3);
  double worst = 0.0;
  std::size_t recon_fail = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const CadlagPath x = oracle::random_path(rng, size(rng), dim(rng));
    for (double p : {1.5, 2.5}) {
      const TimeChange tc = holder_reparam(x, p);
      for (std::size_t a = 0; a < tc.g_times.size(); ++a)
        for (std::size_t b = a + 1; b < tc.g_times.size(); ++b)
          worst = std::max(worst, (tc.g_values[b] - tc.g_values[a]).norm() /
                                      std::pow(tc.g_times[b] - tc.g_times[a], 1.0 / p));
      for (std::size_t i = 0; i < x.size(); ++i) recon_fail += !(tc.g(tc.phi[i]) == x.value(i));
    }
  }
  return {worst <= 1.0 + 1e-9 && recon_fail == 0,
          "max ratio 1 + " + fmt("%.3g", worst - 1.0) + ", reconstruction mismatches " +
              std::to_string(recon_fail)};
}

// 10. Counting bound with constant 1.
Outcome counting_bound() {
  std::mt19937_64 rng(1010);
  const double q = 2.5;
  std::size_t pairs = 0, violations = 0, corrected_violations = 0;
  std::string example;
  for (int trial = 0; trial < 100; ++trial) {
    const CadlagPath x = oracle::random_path(rng, 2 + trial % 15, 1 + trial % 3);
    const std::vector<double> g = oracle::grid(x);
    for (int n = 0; n <= 8; ++n) {
      const std::vector<double> taus = stopping_times(x, n).times;
      const double scale = std::pow(2.0, n * q);
      for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = i; j < g.size(); ++j) {
          ++pairs;
          const std::size_t count = oracle::count_in(taus, g[i], g[j]);
          const double c = raw_p_variation(x, q, g[i], g[j]);
          if (static_cast<double>(count) > scale * c) {
            ++violations;
            if (example.empty() && g[i] < g[j]) {
              std::ostringstream os;
              os.precision(6);
              os << "e.g. n=" << n << " [" << g[i] << ", " << g[j] << "] count " << count
                 << " > " << scale * c;
              example = os.str();
            }
          }
          if (count > 0 && static_cast<double>(count - 1) > scale * c * (1 + 1e-12))
            ++corrected_violations;
        }
      }
    }
  }
  return {violations == 0, std::to_string(violations) + "/" + std::to_string(pairs) +
                               " (path, level, [s,t]) cases exceed 2^{nq} c; " + example +
                               "; count - 1 <= 2^{nq} c fails in " +
                               std::to_string(corrected_violations)};
}

// 11. Determinism of the CLI pipeline.
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool pipeline(const fs::path& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ostringstream out, err;
  auto call = [&](std::vector<std::string> args) {
    return cli::run(args, out, err) == 0;
  };
  std::vector<std::string> report{"report"};
  bool ok = true;
  const std::string models[] = {"brownian", "compound_poisson", "ito_semimartingale", "fbm",
                                "fv_staircase"};
  for (const std::string& model : models) {
    for (const std::string seed : {"2", "1"}) {
      const std::string stem = (dir / (model + "_" + seed)).string();
      const std::string method = model == "fbm" ? "gaussian" : "ito";
      ok &= call({"simulate", "--model", model, "--d", "2", "--steps", "1024", "--seed", seed,
                  "--lambda", "200", "--jump-std", "0.05", "--hurst", "0.75", "--out", stem + ".csv", "--spec-out",
                  stem + ".spec.json"});
      ok &= call({"lift", "--input", stem + ".csv", "--method", method, "--spec",
                  stem + ".spec.json", "--out", stem + ".lift.json"});
      ok &= call({"rate", "--input", stem + ".csv", "--nmin", "3", "--nmax", "10", "--out", stem + ".rate.json"});
      ok &= call({"pvar", "--input", stem + ".csv", "--p", "2.5", "--out", stem + ".pvar.json"});
      ok &= call({"reparam", "--input", stem + ".csv", "--p", "2.5", "--out",
                  stem + ".reparam.json"});
      ok &= call({"verify", "--input", stem + ".lift.json", "--checks", "chen,ibp"});
      report.insert(report.end(), {"--lift", stem + ".lift.json", "--rate", stem + ".rate.json"});
    }
  }
  report.insert(report.end(), {"--out", (dir / "report.csv").string()});
  ok &= call(report);
  if (!ok) std::fprintf(stderr, "%s", err.str().c_str());
  return ok;
}

Outcome determinism() {
  const fs::path base = fs::temp_directory_path() / "roughcadlag_acceptance";
  setenv("ROUGHCADLAG_THREADS", "1", 1);
  const bool first = pipeline(base / "run1");
  setenv("ROUGHCADLAG_THREADS", "4", 1);
  const bool second = pipeline(base / "run2");
  unsetenv("ROUGHCADLAG_THREADS");
  if (!first || !second) return {false, "pipeline step failed"};
  std::size_t files = 0, differing = 0;
  for (const auto& entry : fs::directory_iterator(base / "run1")) {
    ++files;
    const fs::path other = base / "run2" / entry.path().filename();
    if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) ++differing;
  }
  std::size_t rows = 0;
  {
    std::istringstream lines(slurp(base / "run1" / "report.csv"));
    std::string line;
    while (std::getline(lines, line)) ++rows;
  }
  return {differing == 0 && files > 0 && rows == 11,
          std::to_string(files) + " files compared, " + std::to_string(differing) +
              " differ, report rows " + std::to_string(rows - 1)};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;  ///< 0: no runtime limit
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "oracle equality", 30.0, oracle_equality},
      {2, "Chen's relation", 60.0, chen_relation},
      {3, "approximation bound", 0.0, approximation_bound},
      {4, "rate condition", 300.0, rate_condition},
      {5, "Itô correction identity", 0.0, ito_correction},
      {6, "two-jump example", 0.0, two_jump_example},
      {7, "Young regime", 0.0, young_regime},
      {8, "Gaussian diagonal convention", 0.0, gaussian_diagonal},
      {9, "Hölder reparametrization", 0.0, holder_reparametrization},
      {10, "counting bound", 0.0, counting_bound},
      {11, "determinism", 0.0, determinism},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0.0 && secs > c.limit_seconds) {
      o.pass = false;
      o.detail += "; over the " + fmt("%.0f", c.limit_seconds) + " s limit";
    }
    failed += !o.pass;
    std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
