#include "roughcadlag/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <tuple>

#include <CLI11.hpp>

#include "roughcadlag/errors.hpp"
#include "roughcadlag/extension.hpp"
#include "roughcadlag/io.hpp"
#include "roughcadlag/lift.hpp"
#include "roughcadlag/parallel.hpp"
#include "roughcadlag/pvar.hpp"
#include "roughcadlag/simulate.hpp"

namespace roughcadlag::cli {

namespace {

/// Seed of the random index triples and pairs used by verify and report.
constexpr std::uint64_t kCheckSeed = 20240601;
constexpr std::size_t kCheckSamples = 1000;

class VerificationFailure : public std::runtime_error {
 public:
  VerificationFailure(std::string check, double value, double tol)
      : std::runtime_error("check " + check + " failed"),
        check_(std::move(check)),
        value_(value),
        tol_(tol) {}
  const std::string& check() const noexcept { return check_; }
  double value() const noexcept { return value_; }
  double tol() const noexcept { return tol_; }

 private:
  std::string check_;
  double value_;
  double tol_;
};

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string one_line(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  std::replace(text.begin(), text.end(), '"', '\'');
  return text;
}

void report_error(std::ostream& err, const std::string& kind, const std::string& reason,
                  const std::string& extra = "") {
  err << "error=" << kind;
  if (!extra.empty()) err << ' ' << extra;
  err << " reason=\"" << one_line(reason) << "\"\n";
}

/// Writes to `file` when given, else to `out`.
void emit(const std::string& file, std::ostream& out, const std::function<void(std::ostream&)>& write) {
  if (file.empty()) {
    write(out);
    return;
  }
  std::ofstream f(file, std::ios::binary);
  if (!f) throw DomainError("cannot open " + file + " for writing");
  write(f);
  if (!f) throw DomainError("failed writing " + file);
}

void emit_json(const std::string& file, std::ostream& out, const nlohmann::json& j) {
  emit(file, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

using Triple = std::tuple<std::size_t, std::size_t, std::size_t>;
using Pair = std::pair<std::size_t, std::size_t>;

std::vector<Triple> random_triples(std::size_t n, std::size_t count) {
  Rng rng(kCheckSeed);
  std::vector<Triple> out;
  out.reserve(count);
  auto draw = [&] { return std::min(n - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(n))); };
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t a[3] = {draw(), draw(), draw()};
    std::sort(a, a + 3);
    out.emplace_back(a[0], a[1], a[2]);
  }
  return out;
}

std::vector<Pair> random_pairs(std::size_t n, std::size_t count) {
  std::vector<Pair> out;
  out.reserve(count + 1);
  out.emplace_back(0, n - 1);
  for (const auto& [i, j, k] : random_triples(n, count)) out.emplace_back(i, k);
  return out;
}

double chen_at(const RoughLift& lift, std::size_t i, std::size_t j, std::size_t k) {
  const CadlagPath& x = lift.path();
  const Vector first = x.value(j) - x.value(i);
  const Vector second = x.value(k) - x.value(j);
  return (lift.area_at(i, k) - lift.area_at(i, j) - lift.area_at(j, k) -
          first * second.transpose())
      .norm();
}

double max_chen_defect(const RoughLift& lift) {
  double worst = 0.0;
  for (const auto& [i, j, k] : random_triples(lift.path().size(), kCheckSamples))
    worst = std::max(worst, chen_at(lift, i, j, k));
  return worst;
}

std::map<std::string, std::string> read_source(const std::string& file) {
  std::map<std::string, std::string> source;
  if (file.empty()) return source;
  const nlohmann::json spec = load_json(file);
  if (!spec.is_object()) throw SchemaError("spec", "expected an object");
  for (const auto& [k, v] : spec.items()) {
    if (v.is_string())
      source[k] = v.get<std::string>();
    else if (v.is_number_integer() || v.is_number_unsigned())
      source[k] = v.dump();
    else if (v.is_number())
      source[k] = format_double(v.get<double>());
    else if (v.is_boolean())
      source[k] = v.get<bool>() ? "true" : "false";
  }
  return source;
}

// --- subcommands ---

struct SimulateArgs {
  std::string model = "brownian";
  std::size_t d = 1;
  double horizon = 1.0;
  std::size_t steps = 1024;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  double hurst = 0.5;
  double jump_mean = 0.0;
  double jump_std = 1.0;
  double q = 1.5;
  std::string out;
  std::string spec_out;
};

int do_simulate(const SimulateArgs& a, std::ostream& out) {
  GeneratorSpec spec;
  spec.model = parse_model(a.model);
  spec.d = a.d;
  spec.horizon = a.horizon;
  spec.steps = a.steps;
  spec.seed = a.seed;
  spec.lambda = a.lambda;
  spec.hurst = a.hurst;
  spec.jump_mean = a.jump_mean;
  spec.jump_std = a.jump_std;
  spec.q = a.q;
  const CadlagPath path = generate(spec);
  if (!a.spec_out.empty()) {
    save_json(a.spec_out, {{"model", to_string(spec.model)},
                           {"d", spec.d},
                           {"T", spec.horizon},
                           {"steps", spec.steps},
                           {"seed", spec.seed},
                           {"lambda", spec.lambda},
                           {"hurst", spec.hurst},
                           {"jump_mean", spec.jump_mean},
                           {"jump_std", spec.jump_std},
                           {"q", spec.q}});
  }
  emit(a.out, out, [&](std::ostream& os) { write_path_csv(os, path); });
  return kExitOk;
}

struct LiftArgs {
  std::string input;
  std::string method = "ito";
  int n_min = 0;
  int n_max = 32;
  std::optional<double> tol;
  double p = 2.5;
  double q = 1.5;
  bool strict = false;
  std::string perturbation;
  std::string spec;
  std::string out;
};

int do_lift(const LiftArgs& a, std::ostream& out) {
  const CadlagPath path = load_path_csv(a.input);
  LiftOptions options;
  options.n_min = a.n_min;
  options.n_max = a.n_max;
  options.tol = a.tol;
  options.strict = a.strict;
  options.p = a.p;

  std::optional<RoughLift> lift;
  if (a.method == "ito") {
    lift = ito_lift(path, options);
  } else if (a.method == "gaussian") {
    lift = gaussian_lift(path, options);
  } else if (a.method == "young") {
    lift = young_lift(path, a.q, a.p);
  } else if (a.method == "perturbed") {
    if (a.perturbation.empty()) throw DomainError("perturbed lift needs --perturbation");
    lift = perturbed_lift(path, load_path_csv(a.perturbation), a.q, options);
  } else {
    throw DomainError("unknown lift method '" + a.method + "'");
  }
  nlohmann::json j = to_json(*lift);
  const auto source = read_source(a.spec);
  if (!source.empty()) j["meta"]["source"] = source;
  emit_json(a.out, out, j);
  return kExitOk;
}

int do_pvar(const std::string& input, double p, const std::string& file, std::ostream& out) {
  emit_json(file, out, to_json(p_variation(load_path_csv(input), p)));
  return kExitOk;
}

struct RateArgs {
  std::string input;
  int n_min = 3;
  int n_max = 10;
  std::size_t check_points = 10;
  std::string reference = "level";
  std::string out;
};

int do_rate(const RateArgs& a, std::ostream& out) {
  const CadlagPath path = load_path_csv(a.input);
  if (!(a.n_min < a.n_max)) throw DomainError("rate: need nmin < nmax");
  std::optional<MatrixPath> reference;
  int reference_level = -1;
  if (a.reference == "level") {
    reference_level = a.n_max + 2;
    reference = dyadic_integral_path(path, reference_level);
  } else if (a.reference == "exact") {
    reference = left_point_integral(path);
  } else {
    throw DomainError("unknown reference '" + a.reference + "'");
  }
  const std::vector<double> checks = default_check_times(path.horizon(), a.check_points);
  const RateFit fit = fit_rate(
      path, [&](double t) { return reference->eval(t); }, checks, a.n_min, a.n_max);
  nlohmann::json j = to_json(fit);
  j["reference"] = a.reference;
  j["reference_level"] = reference_level;
  j["check_points"] = checks;
  emit_json(a.out, out, j);
  return kExitOk;
}

int do_verify(const std::string& input, const std::string& checks, std::ostream& out) {
  const RoughLift lift = lift_from_json(load_json(input));
  const double scale = lift.scale();
  const double tol = 1e-10 * scale;
  const std::size_t n = lift.path().size();

  nlohmann::json results = nlohmann::json::object();
  std::optional<VerificationFailure> failure;
  auto record = [&](const std::string& name, double value, double limit) {
    results[name] = {{"value", value}, {"tol", limit}, {"ok", value <= limit}};
    if (!(value <= limit) && !failure) failure.emplace(name, value, limit);
  };

  std::stringstream list(checks);
  std::string check;
  while (std::getline(list, check, ',')) {
    if (check == "chen") {
      record(check, max_chen_defect(lift), tol);
    } else if (check == "ibp") {
      const std::vector<Pair> pairs = random_pairs(n, kCheckSamples);
      const std::vector<double> defects = ito_symmetry_defects(
          lift, lift.meta().level, pairs, lift.meta().geometric_diagonal);
      record(check, *std::max_element(defects.begin(), defects.end()), tol);
    } else if (check == "zero") {
      double worst = 0.0;
      for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, lift.area_at(i, i).norm());
      record(check, worst, 0.0);
    } else if (check == "diagonal") {
      double worst = 0.0;
      const CadlagPath& x = lift.path();
      for (const auto& [i, j] : random_pairs(n, kCheckSamples)) {
        const Vector dx = x.value(j) - x.value(i);
        const Matrix area = lift.area_at(i, j);
        for (Eigen::Index k = 0; k < dx.size(); ++k)
          worst = std::max(worst, std::abs(area(k, k) - 0.5 * (dx(k) * dx(k))));
      }
      record(check, worst, 0.0);
    } else if (check == "stabilized") {
      record(check, lift.meta().gap, lift.meta().tol);
    } else {
      throw DomainError("unknown check '" + check + "'");
    }
  }
  out << results.dump(2) << '\n';
  if (failure) throw *failure;
  return kExitOk;
}

int do_reparam(const std::string& input, double p, const std::string& file, std::ostream& out) {
  emit_json(file, out, to_json(holder_reparam(load_path_csv(input), p)));
  return kExitOk;
}

struct ReportRow {
  std::string model;
  std::string seed;
  std::string line;
};

std::string source_field(const RoughLift& lift, const std::string& key) {
  const auto& source = lift.meta().source;
  const auto it = source.find(key);
  return it == source.end() ? std::string() : it->second;
}

double rate_field(const nlohmann::json& rate, const std::string& key) {
  if (!rate.is_object() || !rate.contains(key)) throw SchemaError(key, "missing from rate file");
  if (!rate.at(key).is_number()) throw SchemaError(key, "expected a number");
  return rate.at(key).get<double>();
}

/// Numeric seeds sort numerically, anything else after them as text.
bool seed_less(const std::string& a, const std::string& b) {
  auto key = [](const std::string& s) {
    const bool numeric = !s.empty() && std::all_of(s.begin(), s.end(), ::isdigit);
    return std::make_tuple(!numeric, numeric ? s.size() : 0, s);
  };
  return key(a) < key(b);
}

int do_report(const std::vector<std::string>& lifts, const std::vector<std::string>& rates,
              const std::string& file, std::ostream& out) {
  if (lifts.size() != rates.size())
    throw SchemaError("rate", "each --lift needs a matching --rate");
  std::vector<ReportRow> rows = parallel_map(lifts.size(), [&](std::size_t k) {
    RoughLift lift = [&] {
      try {
        return lift_from_json(load_json(lifts[k]));
      } catch (const SchemaError& e) {
        throw SchemaError(e.field(), std::string(e.what()) + " in " + lifts[k]);
      }
    }();
    const nlohmann::json rate = load_json(rates[k]);
    const double slope = rate_field(rate, "slope");
    const double r2 = rate_field(rate, "r2");
    ReportRow row;
    row.model = source_field(lift, "model");
    row.seed = source_field(lift, "seed");
    std::string steps = source_field(lift, "steps");
    if (steps.empty()) steps = std::to_string(lift.path().size());
    std::ostringstream line;
    line << row.model << ',' << lift.dim() << ',' << steps << ',' << row.seed << ','
         << format_double(lift.p()) << ',' << format_double(p_variation(lift.path(), lift.p()).value)
         << ',' << format_double(area_variation(lift).value) << ','
         << format_double(max_chen_defect(lift)) << ',' << format_double(slope) << ','
         << format_double(r2);
    row.line = line.str();
    return row;
  });
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    if (a.model != b.model) return a.model < b.model;
    return seed_less(a.seed, b.seed);
  });
  emit(file, out, [&](std::ostream& os) {
    os << "model,d,steps,seed,p,pvar_x,pvar_area,max_chen_defect,rate_slope,rate_r2\n";
    for (const ReportRow& row : rows) os << row.line << '\n';
  });
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Itô rough-path lifts of càdlàg staircase paths", "roughcadlag"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a sample path (CSV)");
  simulate->add_option("--model", sim.model, "brownian|compound_poisson|ito_semimartingale|fbm|fv_staircase");
  simulate->add_option("--d", sim.d, "Dimension");
  simulate->add_option("--T", sim.horizon, "Horizon");
  simulate->add_option("--steps", sim.steps, "Grid points");
  simulate->add_option("--seed", sim.seed, "Random seed");
  simulate->add_option("--lambda", sim.lambda, "Jump intensity");
  simulate->add_option("--hurst", sim.hurst, "Hurst index (fbm)");
  simulate->add_option("--jump-mean", sim.jump_mean, "Mean jump size");
  simulate->add_option("--jump-std", sim.jump_std, "Jump size standard deviation");
  simulate->add_option("--q", sim.q, "Variation class (fv_staircase)");
  simulate->add_option("--out", sim.out, "Output CSV (default stdout)");
  simulate->add_option("--spec-out", sim.spec_out, "Write the generator settings as JSON");

  LiftArgs lf;
  double lift_tol = 0.0;
  auto* lift = app.add_subcommand("lift", "Build a rough lift (JSON)");
  lift->add_option("--input", lf.input, "Path CSV")->required();
  lift->add_option("--method", lf.method, "ito|gaussian|young|perturbed");
  lift->add_option("--nmin", lf.n_min, "First dyadic level");
  lift->add_option("--nmax", lf.n_max, "Last dyadic level");
  auto* tol_opt = lift->add_option("--tol", lift_tol, "Stabilization tolerance");
  lift->add_option("--p", lf.p, "Declared regularity in (2, 3)");
  lift->add_option("--q", lf.q, "Young exponent in [1, 2)");
  lift->add_flag("--strict", lf.strict, "Fail when the levels do not stabilize");
  lift->add_option("--perturbation", lf.perturbation, "Finite-variation path CSV (perturbed)");
  lift->add_option("--spec", lf.spec, "Generator JSON recorded as meta.source");
  lift->add_option("--out", lf.out, "Output JSON (default stdout)");

  std::string pvar_input, pvar_out;
  double pvar_p = 2.5;
  auto* pvar = app.add_subcommand("pvar", "p-variation of a path (JSON)");
  pvar->add_option("--input", pvar_input, "Path CSV")->required();
  pvar->add_option("--p", pvar_p, "Exponent >= 1");
  pvar->add_option("--out", pvar_out, "Output JSON (default stdout)");

  RateArgs ra;
  auto* rate = app.add_subcommand("rate", "Convergence rate of the dyadic integrals (JSON)");
  rate->add_option("--input", ra.input, "Path CSV")->required();
  rate->add_option("--nmin", ra.n_min, "First level");
  rate->add_option("--nmax", ra.n_max, "Last level");
  rate->add_option("--check-points", ra.check_points, "Size of the check set (includes T)");
  rate->add_option("--reference", ra.reference, "level (nmax + 2) or exact (full-grid sum)");
  rate->add_option("--out", ra.out, "Output JSON (default stdout)");

  std::string verify_input, verify_checks = "chen,ibp";
  auto* verify = app.add_subcommand("verify", "Check a lift's identities");
  verify->add_option("--input", verify_input, "Lift JSON")->required();
  verify->add_option("--checks", verify_checks, "Comma list of chen,ibp,zero,diagonal,stabilized");

  std::string reparam_input, reparam_out;
  double reparam_p = 2.5;
  auto* reparam = app.add_subcommand("reparam", "Hölder reparametrization g ∘ phi (JSON)");
  reparam->add_option("--input", reparam_input, "Path CSV")->required();
  reparam->add_option("--p", reparam_p, "Exponent >= 1");
  reparam->add_option("--out", reparam_out, "Output JSON (default stdout)");

  std::vector<std::string> report_lifts, report_rates;
  std::string report_out;
  auto* report = app.add_subcommand("report", "Summary table of experiments (CSV)");
  report->add_option("--lift", report_lifts, "Lift JSON (repeatable)");
  report->add_option("--rate", report_rates, "Rate JSON, paired with --lift in order");
  report->add_option("--out", report_out, "Output CSV (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", e.what());
    return kExitUsage;
  }

  try {
    if (*simulate) return do_simulate(sim, out);
    if (*lift) {
      if (*tol_opt) lf.tol = lift_tol;
      return do_lift(lf, out);
    }
    if (*pvar) return do_pvar(pvar_input, pvar_p, pvar_out, out);
    if (*rate) return do_rate(ra, out);
    if (*verify) return do_verify(verify_input, verify_checks, out);
    if (*reparam) return do_reparam(reparam_input, reparam_p, reparam_out, out);
    if (*report) return do_report(report_lifts, report_rates, report_out, out);
  } catch (const VerificationFailure& e) {
    report_error(err, "verification", e.what(),
                 "check=" + e.check() + " value=" + format_double(e.value()) +
                     " tol=" + format_double(e.tol()));
    return kExitVerification;
  } catch (const ConvergenceError& e) {
    report_error(err, "convergence", e.what(), "gap=" + format_double(e.gap()));
    return kExitVerification;
  } catch (const SchemaError& e) {
    report_error(err, "schema", e.what(), "field=" + e.field());
    return kExitDomain;
  } catch (const DegenerateFitError& e) {
    report_error(err, "degenerate_fit", e.what());
    return kExitDomain;
  } catch (const SizeError& e) {
    report_error(err, "size", e.what());
    return kExitDomain;
  } catch (const ConsistencyError& e) {
    report_error(err, "consistency", e.what());
    return kExitVerification;
  } catch (const std::exception& e) {
    report_error(err, "domain", e.what());
    return kExitDomain;
  }
  report_error(err, "usage", "no subcommand");
  return kExitUsage;
}

}  // namespace roughcadlag::cli
