#pragma once

// Command-line driver. `run` takes the argument list without the program
// name and returns the process exit code:
//   0 success, 1 usage error, 2 precondition violation, 3 verification failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qwalk/acceptance.hpp"
#include "qwalk/generating.hpp"
#include "qwalk/limit_measures.hpp"
#include "qwalk/stationary.hpp"
#include "qwalk/walk.hpp"

namespace qwalk::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kPrecondition = 2, kVerification = 3 };

// Unit-norm tolerance for coin states typed on the command line; states this
// close to unit norm are rescaled, anything further is rejected.
inline constexpr double kStateInputTol = 1e-6;

/// Angle pair, coin state and output options shared by the run commands.
struct ExperimentSpec {
  std::string command;
  double omega = std::numbers::pi;
  std::optional<double> omega_degrees;
  std::vector<double> defect_angles;  // ω, ω̃ (overrides omega)
  std::vector<double> bulk_angles{0.0, 0.0};
  std::string alpha = "0.70710678118654752,0";
  std::string beta = "0,0.70710678118654752";
  std::int64_t steps = 1000;
  std::int64_t T = 5000;
  std::int64_t xmax = 10;
  bool compare_theory = false;
  std::string omega_grid = "0:3.14159:16";
  std::string report = "localization";
  unsigned threads = 0;
  std::vector<double> points;
  int sigma = 1;
  int tau = 1;
  std::int64_t window = kDefaultEigenWindow;
  std::vector<std::string> only;
  bool json = false;
  std::string out;
  std::string plot_dir;
};

class UsageError : public std::runtime_error {
 public:
  UsageError(std::string field, const std::string& what)
      : std::runtime_error(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

namespace detail {

inline cplx parse_pair(const std::string& text, const std::string& field) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError(field, "expected re,im");
  try {
    std::size_t used_re = 0, used_im = 0;
    const std::string re = text.substr(0, comma), im = text.substr(comma + 1);
    const double r = std::stod(re, &used_re), i = std::stod(im, &used_im);
    if (used_re != re.size() || used_im != im.size()) throw std::invalid_argument(text);
    return {r, i};
  } catch (const std::logic_error&) {
    throw UsageError(field, "expected re,im with numeric parts, got '" + text + "'");
  }
}

inline double defect_omega(const ExperimentSpec& s) {
  if (s.omega_degrees) return *s.omega_degrees * std::numbers::pi / 180.0;
  return s.omega;
}

inline WalkConfig make_config(const ExperimentSpec& s) {
  const CoinMatrix bulk = make_coin(CoinAngles(s.bulk_angles[0], s.bulk_angles[1]));
  if (!s.defect_angles.empty())
    return WalkConfig(make_coin(CoinAngles(s.defect_angles[0], s.defect_angles[1])), bulk);
  const double omega = defect_omega(s);
  if (!(omega >= 0.0 && omega < 2.0 * std::numbers::pi))
    throw PreconditionError("omega", "angle must lie in [0, 2pi)");
  return WalkConfig(make_coin(CoinAngles(0.0, omega)), bulk);
}

struct ParsedState {
  CoinState state;
  double input_norm2;
};

inline ParsedState make_state(const ExperimentSpec& s) {
  const cplx a = parse_pair(s.alpha, "alpha"), b = parse_pair(s.beta, "beta");
  const double n2 = std::norm(a) + std::norm(b);
  if (std::abs(n2 - 1.0) > kStateInputTol)
    throw PreconditionError("alpha", "|alpha|^2 + |beta|^2 must equal 1");
  const double n = std::sqrt(n2);
  return {CoinState(a / n, b / n), n2};
}

inline std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw UsageError("omega-grid", "expected start:stop:count");
  double a = 0.0, b = 0.0;
  long k = 0;
  try {
    a = std::stod(parts[0]);
    b = std::stod(parts[1]);
    k = std::stol(parts[2]);
  } catch (const std::logic_error&) {
    throw UsageError("omega-grid", "expected start:stop:count");
  }
  if (k < 1) throw PreconditionError("omega-grid", "count must be >= 1");
  std::vector<double> grid;
  for (long i = 0; i < k; ++i) grid.push_back(k == 1 ? a : a + (b - a) * i / (k - 1));
  return grid;
}

/// Writes to --out if given, otherwise to the command's stdout stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw PreconditionError("out", "cannot open output file " + path);
      stream_ = file_.get();
    }
    *stream_ << std::setprecision(17);
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline std::string fmt(cplx v) {
  const double re = v.real() + 0.0, im = v.imag() + 0.0;
  return fmt(re) + (im < 0 ? "" : "+") + fmt(im) + "i";
}

inline void write_metadata(std::ostream& os, const ExperimentSpec& s, const WalkConfig* config,
                           const ParsedState* state) {
  os << "# command=" << s.command << '\n';
  if (config) {
    const Mat2& u0 = config->defect().matrix();
    const Mat2& u = config->bulk().matrix();
    os << "# defect=[[" << fmt(u0.a) << "," << fmt(u0.b) << "],[" << fmt(u0.c) << ","
       << fmt(u0.d) << "]]\n";
    os << "# bulk=[[" << fmt(u.a) << "," << fmt(u.b) << "],[" << fmt(u.c) << "," << fmt(u.d)
       << "]]\n";
  }
  if (state) {
    os << "# alpha=" << fmt(state->state.alpha()) << '\n';
    os << "# beta=" << fmt(state->state.beta()) << '\n';
    if (state->input_norm2 != 1.0) os << "# input_norm2=" << fmt(state->input_norm2) << '\n';
  }
}

inline void write_series(const std::string& dir, const std::string& name,
                         const std::vector<std::pair<double, double>>& rows) {
  std::filesystem::create_directories(dir);
  std::ofstream f(std::filesystem::path(dir) / name);
  if (!f) throw PreconditionError("plot-dir", "cannot write into " + dir);
  f << std::setprecision(17);
  for (const auto& [x, y] : rows) f << x << ' ' << y << '\n';
}

/// Runs fn(i) for i in [0, n) on `threads` workers; results land by index.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, unsigned threads, F&& fn) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          out[i] = fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// ---------------------------------------------------------------------------
// Commands

inline int cmd_simulate(const ExperimentSpec& s, std::ostream& out) {
  if (s.steps < 0) throw PreconditionError("steps", "must be >= 0");
  const WalkConfig config = make_config(s);
  const ParsedState st = make_state(s);
  const Measure mu = measure(evolve(SpinorField::localized(0, st.state), config, s.steps));
  Sink sink(s.out, out);
  write_metadata(*sink, s, &config, &st);
  *sink << "# steps=" << s.steps << '\n' << "x,mu\n";
  std::vector<std::pair<double, double>> rows;
  for (std::int64_t x = mu.lo(); x <= mu.hi(); ++x) {
    *sink << x << ',' << mu.at(x) << '\n';
    rows.emplace_back(static_cast<double>(x), mu.at(x));
  }
  if (!s.plot_dir.empty()) write_series(s.plot_dir, "mu.dat", rows);
  return kOk;
}

inline int cmd_timeavg(const ExperimentSpec& s, std::ostream& out) {
  if (s.T < 1) throw PreconditionError("T", "must be >= 1");
  if (s.xmax < 0) throw PreconditionError("xmax", "must be >= 0");
  const WalkConfig config = make_config(s);
  const ParsedState st = make_state(s);
  const Measure avg = time_average(SpinorField::localized(0, st.state), config, s.T);
  Sink sink(s.out, out);
  write_metadata(*sink, s, &config, &st);
  *sink << "# T=" << s.T << '\n';
  if (!s.compare_theory) {
    *sink << "x,empirical\n";
    for (std::int64_t x = -s.xmax; x <= s.xmax; ++x) *sink << x << ',' << avg.at(x) << '\n';
    return kOk;
  }
  *sink << "x,empirical,theory,abs_diff\n";
  double worst = 0.0;
  for (std::int64_t x = -s.xmax; x <= s.xmax; ++x) {
    const double theory = time_avg_limit(config, st.state, x);
    const double diff = std::abs(avg.at(x) - theory);
    worst = std::max(worst, diff);
    *sink << x << ',' << avg.at(x) << ',' << theory << ',' << diff << '\n';
  }
  *sink << "# max_abs_diff=" << worst << '\n';
  return kOk;
}

inline int cmd_sweep(const ExperimentSpec& s, std::ostream& out) {
  if (s.report != "localization" && s.report != "timeavg")
    throw UsageError("report", "expected localization or timeavg");
  const std::vector<double> grid = parse_grid(s.omega_grid);
  const ParsedState st = make_state(s);
  const CoinMatrix bulk = make_coin(CoinAngles(s.bulk_angles[0], s.bulk_angles[1]));
  for (double omega : grid)
    if (!(omega >= 0.0 && omega < 2.0 * std::numbers::pi))
      throw PreconditionError("omega-grid", "angles must lie in [0, 2pi)");
  const bool with_engine = s.report == "timeavg";
  if (with_engine && s.T < 1) throw PreconditionError("T", "must be >= 1");

  struct Row {
    double m = 0.0, atom = 0.0, origin = 0.0, gamma = 0.0, empirical = 0.0;
    bool localized = false;
  };
  const unsigned threads = s.threads ? s.threads : std::max(1u, std::thread::hardware_concurrency());
  const std::vector<Row> rows = parallel_map<Row>(grid.size(), threads, [&](std::size_t i) {
    const WalkConfig config(make_coin(CoinAngles(0.0, grid[i])), bulk);
    Row r;
    const PoleSet poles = find_poles(config);
    r.m = poles.m;
    r.localized = poles.localized();
    r.gamma = poles.localized() ? poles.gamma : std::nan("");
    r.atom = localized_mass(config, st.state);
    r.origin = time_avg_limit(config, st.state, 0);
    if (with_engine)
      r.empirical = time_average(SpinorField::localized(0, st.state), config, s.T).at(0);
    return r;
  });

  Sink sink(s.out, out);
  write_metadata(*sink, s, nullptr, &st);
  *sink << "# omega_grid=" << s.omega_grid << '\n' << "# report=" << s.report << '\n';
  if (with_engine) *sink << "# T=" << s.T << '\n';
  *sink << "index,omega,m,localized,C,mu_bar_0,gamma" << (with_engine ? ",mu_T_0" : "") << '\n';
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Row& r = rows[i];
    *sink << i << ',' << grid[i] << ',' << r.m << ',' << (r.localized ? 1 : 0) << ',' << r.atom
          << ',' << r.origin << ',' << r.gamma;
    if (with_engine) *sink << ',' << r.empirical;
    *sink << '\n';
  }
  return kOk;
}

inline int cmd_weak(const ExperimentSpec& s, std::ostream& out) {
  if (s.steps < 1) throw PreconditionError("steps", "must be >= 1");
  const WalkConfig config = make_config(s);
  const ParsedState st = make_state(s);
  std::vector<double> points = s.points;
  if (points.empty()) points = acceptance::weak_test_points();
  const std::vector<double> empirical =
      rescaled_empirical_cdf(SpinorField::localized(0, st.state), config, s.steps, points);
  const WeakLimitDensity d = weak_density(config, st.state);
  Sink sink(s.out, out);
  write_metadata(*sink, s, &config, &st);
  *sink << "# steps=" << s.steps << '\n'
        << "# atom_mass=" << d.atom_mass() << '\n'
        << "# continuous_mass=" << d.continuous_mass() << '\n'
        << "y,empirical_cdf,weak_cdf,abs_diff\n";
  double worst = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double theory = d.cdf(points[i]);
    const double diff = std::abs(empirical[i] - theory);
    worst = std::max(worst, diff);
    *sink << points[i] << ',' << empirical[i] << ',' << theory << ',' << diff << '\n';
  }
  *sink << "# max_abs_diff=" << worst << '\n';
  if (!s.plot_dir.empty()) {
    std::vector<std::pair<double, double>> density, cdf;
    const int k = 400;
    for (int i = 1; i < k; ++i) {
      const double x = -d.radius() + 2.0 * d.radius() * i / k;
      density.emplace_back(x, d.continuous(x));
    }
    for (int i = 0; i <= k; ++i) {
      const double y = -1.0 + 2.0 * i / k;
      cdf.emplace_back(y, d.cdf(y));
    }
    write_series(s.plot_dir, "density.dat", density);
    write_series(s.plot_dir, "cdf.dat", cdf);
  }
  return kOk;
}

inline int cmd_stationary(const ExperimentSpec& s, std::ostream& out) {
  if (s.steps < 0) throw PreconditionError("steps", "must be >= 0");
  if (s.window < 1) throw PreconditionError("window", "must be >= 1");
  if (s.steps >= s.window) throw PreconditionError("steps", "must be smaller than the window");
  const double omega = defect_omega(s);
  const WalkConfig config = phase_defect::config(omega);
  const EigenData d = make_eigen_data(omega, s.sigma, s.tau);
  const SpinorField e = build_eigenvector(d, s.window);
  const Measure evolved = measure(evolve(e, config, s.steps));
  Sink sink(s.out, out);
  write_metadata(*sink, s, &config, nullptr);
  *sink << "# sigma=" << s.sigma << '\n'
        << "# tau=" << s.tau << '\n'
        << "# eta=" << fmt(d.eta) << '\n'
        << "# gamma=" << fmt(d.gamma_root) << '\n'
        << "# phi_L0=" << fmt(d.phi_L0) << '\n'
        << "# phi_R0=" << fmt(d.phi_R0) << '\n'
        << "# steps=" << s.steps << '\n'
        << "# window=" << s.window << '\n'
        << "x,stationary,evolved,abs_diff\n";
  const std::int64_t reach = std::min<std::int64_t>(s.xmax, s.window - s.steps);
  double worst = 0.0;
  for (std::int64_t x = -reach; x <= reach; ++x) {
    const double theory = stationary_mass(omega, d.phi_L0, d.phi_R0, x);
    const double diff = std::abs(evolved.at(x) - theory);
    worst = std::max(worst, diff);
    *sink << x << ',' << theory << ',' << evolved.at(x) << ',' << diff << '\n';
  }
  *sink << "# max_abs_diff=" << worst << '\n';
  return kOk;
}

inline nlohmann::json to_json(const acceptance::CriterionResult& r) {
  const acceptance::Check& w = r.worst();
  nlohmann::json checks = nlohmann::json::array();
  for (const acceptance::Check& c : r.checks)
    checks.push_back({{"label", c.label},
                      {"target", c.target},
                      {"measured", c.measured},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass}});
  return {{"criterion", std::to_string(r.id) + ":" + r.name},
          {"target", w.target},
          {"measured", w.measured},
          {"tolerance", w.tolerance},
          {"pass", r.pass()},
          {"seconds", r.seconds},
          {"checks", checks}};
}

inline int cmd_verify(const ExperimentSpec& s, std::ostream& out) {
  std::vector<const acceptance::Criterion*> selected;
  if (s.only.empty()) {
    for (const acceptance::Criterion& c : acceptance::criteria()) selected.push_back(&c);
  } else {
    for (const std::string& key : s.only) {
      const acceptance::Criterion* c = acceptance::find_criterion(key);
      if (!c) throw UsageError("only", "unknown criterion '" + key + "'");
      selected.push_back(c);
    }
  }
  bool all = true;
  nlohmann::json report = nlohmann::json::array();
  Sink sink(s.out, out);
  for (const acceptance::Criterion* c : selected) {
    const acceptance::CriterionResult r = c->run();
    all = all && r.pass();
    if (s.json) {
      report.push_back(to_json(r));
      continue;
    }
    const acceptance::Check& w = r.worst();
    *sink << (r.pass() ? "PASS" : "FAIL") << ' ' << r.id << ' ' << r.name << ": " << w.label
          << " measured=" << w.measured << " target=" << w.target << " tol=" << w.tolerance
          << '\n';
  }
  if (s.json) *sink << report.dump(2) << '\n';
  return all ? kOk : kVerification;
}

inline void error_record(std::ostream& err, const std::string& kind, const std::string& field,
                         const std::string& message) {
  err << nlohmann::json{{"error", kind}, {"field", field}, {"message", message}}.dump() << '\n';
}

inline void add_walk_options(CLI::App* sub, ExperimentSpec& s) {
  auto* omega = sub->add_option("--omega", s.omega, "defect angle: U0 = U(0, omega), radians");
  sub->add_option("--omega-degrees", s.omega_degrees, "defect angle in degrees")->excludes(omega);
  sub->add_option("--defect-angles", s.defect_angles, "defect coin angles omega,omega_tilde")
      ->expected(2)
      ->delimiter(',');
  sub->add_option("--bulk-angles", s.bulk_angles, "bulk coin angles omega,omega_tilde")
      ->expected(2)
      ->delimiter(',');
}

inline void add_state_options(CLI::App* sub, ExperimentSpec& s) {
  sub->add_option("--alpha", s.alpha, "initial left amplitude re,im");
  sub->add_option("--beta", s.beta, "initial right amplitude re,im");
}

inline void add_out(CLI::App* sub, ExperimentSpec& s) {
  sub->add_option("--out", s.out, "output file (default stdout)");
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  ExperimentSpec s;
  CLI::App app("One-defect quantum walk: simulation, limit laws and verification", "qwalk");
  app.set_config("--config", "", "key=value configuration file; flags override it");
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "evolve from the origin and emit mu_n");
  detail::add_walk_options(simulate, s);
  detail::add_state_options(simulate, s);
  simulate->add_option("--steps", s.steps, "number of steps");
  simulate->add_option("--plot-dir", s.plot_dir, "directory for two-column plot data");
  detail::add_out(simulate, s);

  auto* timeavg = app.add_subcommand("timeavg", "time-averaged measure, optionally vs theory");
  detail::add_walk_options(timeavg, s);
  detail::add_state_options(timeavg, s);
  timeavg->add_option("--T", s.T, "averaging horizon");
  timeavg->add_option("--xmax", s.xmax, "report sites |x| <= xmax");
  timeavg->add_flag("--compare-theory", s.compare_theory, "add closed-form column");
  detail::add_out(timeavg, s);

  auto* sweep = app.add_subcommand("sweep", "localization quantities over a defect-angle grid");
  sweep->add_option("--omega-grid", s.omega_grid, "start:stop:count");
  sweep->add_option("--report", s.report, "localization | timeavg");
  sweep->add_option("--T", s.T, "averaging horizon for --report timeavg");
  sweep->add_option("--threads", s.threads, "worker threads (default: all cores)");
  sweep->add_option("--bulk-angles", s.bulk_angles, "bulk coin angles omega,omega_tilde")
      ->expected(2)
      ->delimiter(',');
  detail::add_state_options(sweep, s);
  detail::add_out(sweep, s);

  auto* weak = app.add_subcommand("weak", "empirical X_n/n CDF vs the weak-limit law");
  detail::add_walk_options(weak, s);
  detail::add_state_options(weak, s);
  weak->add_option("--steps", s.steps, "number of steps")->default_val(2000);
  weak->add_option("--points", s.points, "query points y")->delimiter(',');
  weak->add_option("--plot-dir", s.plot_dir, "directory for two-column plot data");
  detail::add_out(weak, s);

  auto* stationary = app.add_subcommand("stationary", "eigenvector stationary measure check");
  auto* omega = stationary->add_option("--omega", s.omega, "defect angle, radians");
  stationary->add_option("--omega-degrees", s.omega_degrees, "defect angle in degrees")
      ->excludes(omega);
  stationary->add_option("--sigma", s.sigma, "branch sign +1 or -1");
  stationary->add_option("--tau", s.tau, "branch sign +1 or -1");
  stationary->add_option("--window", s.window, "truncation window W");
  stationary->add_option("--steps", s.steps, "engine steps")->default_val(50);
  stationary->add_option("--xmax", s.xmax, "report sites |x| <= xmax");
  detail::add_out(stationary, s);

  auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
  verify->add_option("--only", s.only, "criterion names or numbers")->delimiter(',');
  verify->add_flag("--json", s.json, "machine-readable report");
  detail::add_out(verify, s);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    detail::error_record(err, "usage", e.get_name(), e.what());
    return kUsage;
  }

  try {
    if (simulate->parsed()) s.command = "simulate";
    if (timeavg->parsed()) s.command = "timeavg";
    if (sweep->parsed()) s.command = "sweep";
    if (weak->parsed()) s.command = "weak";
    if (stationary->parsed()) s.command = "stationary";
    if (verify->parsed()) s.command = "verify";
    if (s.command == "simulate") return detail::cmd_simulate(s, out);
    if (s.command == "timeavg") return detail::cmd_timeavg(s, out);
    if (s.command == "sweep") return detail::cmd_sweep(s, out);
    if (s.command == "weak") return detail::cmd_weak(s, out);
    if (s.command == "stationary") return detail::cmd_stationary(s, out);
    return detail::cmd_verify(s, out);
  } catch (const UsageError& e) {
    detail::error_record(err, "usage", e.field(), e.what());
    return kUsage;
  } catch (const PreconditionError& e) {
    detail::error_record(err, "precondition", e.field(), e.what());
    return kPrecondition;
  } catch (const Error& e) {
    detail::error_record(err, "precondition", "", e.what());
    return kPrecondition;
  } catch (const std::exception& e) {
    detail::error_record(err, "runtime", "", e.what());
    return kPrecondition;
  }
}

}  // namespace qwalk::cli
