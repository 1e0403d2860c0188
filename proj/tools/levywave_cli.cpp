// Batch experiment driver. Every command reads a single JSON config, runs a
// pipeline from the library and writes CSV tables plus a JSON summary that
// echoes the fully resolved configuration, so runs are self-describing and
// byte-for-byte reproducible from (config, seed).

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "levywave/fields.hpp"
#include "levywave/gauge.hpp"
#include "levywave/levelset.hpp"
#include "levywave/potential.hpp"
#include "levywave/sampling.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace levywave;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  int workers = 1;
  bool seed_override = false;
  std::uint64_t seed = 0;
};

json load_config(const CommonOpts& opts) {
  std::ifstream in(opts.config_path);
  if (!in) throw ConfigError("cannot open config: " + opts.config_path);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (opts.seed_override) cfg["seed"] = opts.seed;
  return cfg;
}

std::uint64_t require_seed(const json& cfg) {
  if (!cfg.contains("seed"))
    throw ConfigError("config field 'seed' is required (entropy-seeded runs are not allowed)");
  return cfg.at("seed").get<std::uint64_t>();
}

template <typename T>
T field(const json& cfg, const char* name) {
  if (!cfg.contains(name)) throw ConfigError(std::string("missing config field: ") + name);
  try {
    return cfg.at(name).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config field '") + name + "': " + e.what());
  }
}

LevyExponent exponent_from(const json& cfg) {
  try {
    return LevyExponent::from_json(cfg.at("exponent"));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad 'exponent' block: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad 'exponent' block: ") + e.what());
  }
}

std::ofstream open_out(const CommonOpts& opts, const std::string& name) {
  fs::create_directories(opts.out_dir);
  const fs::path p = fs::path(opts.out_dir) / name;
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write " + p.string());
  return out;
}

void write_summary(const CommonOpts& opts, json summary, const json& resolved_config) {
  summary["config"] = resolved_config;
  auto out = open_out(opts, "summary.json");
  out << summary.dump(2) << "\n";
  if (!out) throw std::ios_base::failure("failed writing summary.json");
}

Window window_from(const json& cfg, double t_max, double x_max) {
  Window w{0.25 * t_max, t_max, -x_max, x_max};
  if (cfg.contains("window")) {
    const auto& jw = cfg.at("window");
    w.t_lo = field<double>(jw, "t_lo");
    w.t_hi = field<double>(jw, "t_hi");
    w.x_lo = field<double>(jw, "x_lo");
    w.x_hi = field<double>(jw, "x_hi");
  }
  return w;
}

json window_json(const Window& w) {
  return {{"t_lo", w.t_lo}, {"t_hi", w.t_hi}, {"x_lo", w.x_lo}, {"x_hi", w.x_hi}};
}

// ---------------------------------------------------------------------------

int cmd_gauge(const CommonOpts& opts) {
  json cfg = load_config(opts);
  const LevyExponent exp = exponent_from(cfg);
  const GaugeMode mode =
      cfg.value("mode", std::string("closed_form")) == "quadrature"
          ? GaugeMode::Quadrature
          : GaugeMode::ClosedForm;
  const GaugeFunction g(exp, mode);

  double lo = 1e-3, hi = 1e2;
  int count = 40;
  if (cfg.contains("lambda_grid")) {
    const auto& jg = cfg.at("lambda_grid");
    lo = field<double>(jg, "min");
    hi = field<double>(jg, "max");
    count = field<int>(jg, "count");
  }
  cfg["mode"] = mode == GaugeMode::Quadrature ? "quadrature" : "closed_form";
  cfg["lambda_grid"] = {{"min", lo}, {"max", hi}, {"count", count}};

  auto csv = open_out(opts, "gauge.csv");
  csv << "lambda,phi\n";
  for (int i = 0; i < count; ++i) {
    const double lambda = lo * std::pow(hi / lo, count > 1 ? i / double(count - 1) : 0.0);
    csv << lambda << "," << g(lambda) << "\n";
  }

  const double ind = g.upper_index();
  const ZeroCriterion verdict = g.zero_criterion();
  write_summary(opts,
                json{{"upper_index", ind},
                     {"zero_criterion", to_string(verdict)},
                     {"predicted_dimension", g.dimension_formula(2)}},
                cfg);
  std::cout << "upper_index " << ind << "  verdict " << to_string(verdict)
            << "  predicted_dim " << g.dimension_formula(2) << "\n";
  return 0;
}

int cmd_simulate(const CommonOpts& opts) {
  json cfg = load_config(opts);
  const LevyExponent exp = exponent_from(cfg);
  const std::uint64_t seed = require_seed(cfg);
  const int replicas = field<int>(cfg, "replicas");
  if (replicas < 1) throw ConfigError("replicas must be >= 1");
  const auto& jl = cfg.at("lattice");
  const double h = field<double>(jl, "h");
  const double t_max = field<double>(jl, "t_max");
  const double x_max = field<double>(jl, "x_max");
  const RotatedLattice lat = RotatedLattice::cover(t_max, x_max, h);

  std::vector<std::array<double, 2>> apexes = {{t_max / 2.0, 0.0}};
  if (cfg.contains("apexes")) {
    apexes.clear();
    for (const auto& a : cfg.at("apexes"))
      apexes.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
  }
  std::vector<double> xis = cfg.value("xi", std::vector<double>{0.5, 1.0, 2.0});
  const bool dump = cfg.value("dump", false);
  cfg["apexes"] = apexes;
  cfg["xi"] = xis;
  cfg["dump"] = dump;

  // accumulate cos(xi . u) per (apex, xi)
  std::vector<std::vector<double>> sums(apexes.size(), std::vector<double>(xis.size(), 0.0));
  std::vector<std::vector<double>> sums2 = sums;
  for (int r = 0; r < replicas; ++r) {
    RngStream rng(seed, static_cast<std::uint64_t>(r));
    const NoiseField noise(exp, lat, std::move(rng));
    const SolutionField fieldr(noise);
    for (std::size_t a = 0; a < apexes.size(); ++a) {
      const Eigen::VectorXd u = fieldr.u_at(apexes[a][0], apexes[a][1]);
      for (std::size_t q = 0; q < xis.size(); ++q) {
        const Eigen::VectorXd xi = Eigen::VectorXd::Constant(exp.dim(), xis[q]);
        const double c = std::cos(xi.dot(u));
        sums[a][q] += c;
        sums2[a][q] += c * c;
      }
    }
    if (dump) {
      std::ostringstream name;
      name << "field_r" << r << ".bin";
      auto out = open_out(opts, name.str());
      dump_solution(fieldr, json{{"exponent", exp.to_json()}, {"seed", seed}, {"replica", r}},
                    out);
    }
  }

  auto csv = open_out(opts, "charfn.csv");
  csv << "t,x,xi,empirical,theoretical,stderr\n";
  for (std::size_t a = 0; a < apexes.size(); ++a) {
    for (std::size_t q = 0; q < xis.size(); ++q) {
      const double mean = sums[a][q] / replicas;
      const double var = std::max(0.0, sums2[a][q] / replicas - mean * mean);
      const Eigen::VectorXd half_xi =
          Eigen::VectorXd::Constant(exp.dim(), 0.5 * xis[q]);
      const double theo =
          std::exp(-apexes[a][0] * apexes[a][0] * exp.psi(half_xi));
      csv << apexes[a][0] << "," << apexes[a][1] << "," << xis[q] << "," << mean << ","
          << theo << "," << std::sqrt(var / replicas) << "\n";
    }
  }
  write_summary(opts, json{{"replicas", replicas}}, cfg);
  return 0;
}

int cmd_zeros(const CommonOpts& opts) {
  json cfg = load_config(opts);
  const LevyExponent exp = exponent_from(cfg);
  const std::uint64_t seed = require_seed(cfg);
  const auto& jl = cfg.at("lattice");
  const double h = field<double>(jl, "h");
  const double t_max = field<double>(jl, "t_max");
  const double x_max = field<double>(jl, "x_max");
  const double eps = field<double>(cfg, "epsilon");
  const Window w = window_from(cfg, t_max, x_max);
  cfg["window"] = window_json(w);

  const RotatedLattice lat = RotatedLattice::cover(t_max, x_max, h);
  RngStream rng(seed, 0);
  const NoiseField noise(exp, lat, std::move(rng));
  const SolutionField fieldr(noise);
  const ZeroSetSample sample = detect_zeros(fieldr, eps, w);

  auto csv = open_out(opts, "zeros.csv");
  csv << "t,x\n";
  for (const auto& p : sample.points) csv << p[0] << "," << p[1] << "\n";
  write_summary(opts, json{{"epsilon", eps}, {"count", sample.points.size()}}, cfg);
  std::cout << sample.points.size() << " apexes within epsilon\n";
  return 0;
}

int cmd_dimension(const CommonOpts& opts) {
  json cfg = load_config(opts);
  DimensionRunConfig run;
  run.exponent = exponent_from(cfg);
  run.seed = require_seed(cfg);
  const auto& jl = cfg.at("lattice");
  run.h = field<double>(jl, "h");
  run.t_max = field<double>(jl, "t_max");
  run.x_max = field<double>(jl, "x_max");
  run.window = window_from(cfg, run.t_max, run.x_max);
  run.replicas = cfg.value("replicas", 1);
  run.epsilon_factor = cfg.value("epsilon_factor", 1.0);
  run.workers = opts.workers;
  cfg["replicas"] = run.replicas;
  cfg["epsilon_factor"] = run.epsilon_factor;
  cfg["window"] = window_json(run.window);

  const DimensionRunResult res = run_dimension_experiment(run);
  auto csv = open_out(opts, "boxcounts.csv");
  csv << "replica,delta,count\n";
  for (std::size_t r = 0; r < res.per_replica.size(); ++r)
    for (const auto& [delta, n] : res.per_replica[r].counts)
      csv << r << "," << delta << "," << n << "\n";

  const GaugeFunction g(run.exponent);
  const double predicted = g.dimension_formula(2);
  write_summary(opts,
                json{{"predicted_dimension", predicted},
                     {"estimated_dimension", res.mean_slope},
                     {"stderr", res.slope_stderr},
                     {"epsilons", res.epsilons},
                     {"skipped_replicas", res.skipped}},
                cfg);
  std::cout << "predicted " << predicted << "  estimated " << res.mean_slope << " +- "
            << res.slope_stderr << "\n";
  return 0;
}

int cmd_dichotomy(const CommonOpts& opts) {
  json cfg = load_config(opts);
  const std::uint64_t seed = require_seed(cfg);
  const int replicas = field<int>(cfg, "replicas");
  if (replicas < 1) throw ConfigError("replicas must be >= 1");
  std::vector<DichotomyCase> cases;
  for (const auto& jc : cfg.at("cases")) {
    DichotomyCase c;
    c.exponent = LevyExponent::from_json(jc.at("exponent"));
    const auto& jl = jc.at("lattice");
    c.h = field<double>(jl, "h");
    c.t_max = field<double>(jl, "t_max");
    c.x_max = field<double>(jl, "x_max");
    c.window = window_from(jc, c.t_max, c.x_max);
    c.epsilon_schedule = jc.at("epsilon_schedule").get<std::vector<double>>();
    cases.push_back(std::move(c));
  }
  const DichotomyReport report = dichotomy_sweep(cases, replicas, seed, opts.workers);

  auto csv = open_out(opts, "dichotomy.csv");
  csv << "case,epsilon,hit_frequency,stderr\n";
  json cases_summary = json::array();
  for (std::size_t ci = 0; ci < report.cases.size(); ++ci) {
    const auto& cr = report.cases[ci];
    for (const auto& row : cr.rows)
      csv << ci << "," << row.epsilon << "," << row.hit_frequency << "," << row.std_error
          << "\n";
    cases_summary.push_back(json{{"analytic", to_string(cr.analytic)},
                                 {"empirical_subcritical", cr.empirical_subcritical},
                                 {"agrees", cr.agrees}});
  }
  write_summary(opts, json{{"cases", cases_summary}, {"replicas", replicas}}, cfg);
  for (std::size_t ci = 0; ci < report.cases.size(); ++ci)
    std::cout << "case " << ci << ": " << to_string(report.cases[ci].analytic)
              << (report.cases[ci].agrees ? "  agrees" : "  DISAGREES") << "\n";
  return 0;
}

int cmd_capacity(const CommonOpts& opts) {
  json cfg = load_config(opts);
  FrankWolfeSettings settings;
  settings.max_iterations = cfg.value("max_iterations", settings.max_iterations);
  settings.rel_gap_tol = cfg.value("rel_gap_tol", settings.rel_gap_tol);

  CapacityResult res;
  if (cfg.contains("kernel")) {
    // direct kernel-matrix fixture
    const auto rows = cfg.at("kernel").get<std::vector<std::vector<double>>>();
    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (static_cast<Eigen::Index>(rows[i].size()) != n)
        throw ConfigError("kernel matrix must be square");
      for (Eigen::Index j = 0; j < n; ++j) K(i, j) = rows[i][j];
    }
    res = minimize_energy(K, settings);
  } else {
    const GridSet G = GridSet::from_json(cfg.at("grid"));
    const GaugeFunction g(exponent_from(cfg));
    res = capacity(G, g, settings);
  }
  if (!res.converged) throw NumericError("capacity solver did not reach the gap tolerance");

  json out{{"capacity", res.capacity},
           {"min_energy", res.min_energy},
           {"iterations", res.iterations},
           {"gap", res.gap},
           {"measure", res.measure.support.empty()
                           ? json{{"weights", std::vector<double>(
                                                  res.measure.weights.data(),
                                                  res.measure.weights.data() +
                                                      res.measure.weights.size())}}
                           : res.measure.to_json()}};
  auto jf = open_out(opts, "capacity.json");
  jf << out.dump(2) << "\n";
  write_summary(opts, out, cfg);
  std::cout << "capacity " << res.capacity << " (energy " << res.min_energy << ", "
            << res.iterations << " iterations)\n";
  return 0;
}

int cmd_validate(const CommonOpts& opts) {
  // quick invariant battery; heavier law checks live in the test suites
  int failures = 0;
  auto check = [&](const std::string& name, bool ok) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
    if (!ok) ++failures;
  };
  (void)opts;

  const auto exp = LevyExponent::isotropic_stable(1, 2.0, 0.5);
  const GaugeFunction closed(exp), quad(exp, GaugeMode::Quadrature);
  bool mono = true;
  double prev = closed(1e-3);
  for (double l = 2e-3; l < 10.0; l *= 1.5) {
    mono = mono && closed(l) <= prev;
    prev = closed(l);
  }
  check("gauge monotone", mono);
  bool agree = true;
  for (double l : {0.01, 0.1, 1.0, 10.0})
    agree = agree && std::abs(quad(l) / closed(l) - 1.0) < 1e-4;
  check("closed form vs quadrature", agree);
  const auto w = scaling_witness(exp, 2.0);
  check("scaling witness", w.empirical_min_ratio >= w.lower_bound - 1e-12);

  RngStream a(1, 2), b(1, 2);
  bool det = true;
  for (int i = 0; i < 1000; ++i) det = det && a.next_u64() == b.next_u64();
  check("rng determinism", det);

  const RotatedLattice lat = RotatedLattice::cover(1.0, 0.5, 0.125);
  const double area = lat.quadrant_area(4, 4);  // apex t = 0.5
  check("cone area bookkeeping", std::abs(area - 0.25) < 1e-12);

  return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic wave / Levy sheet experiment driver"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string cmd_name;
  for (const char* name :
       {"gauge", "simulate", "zeros", "dimension", "dichotomy", "capacity", "validate"}) {
    auto* sub = app.add_subcommand(name);
    if (std::string(name) != "validate")
      sub->add_option("--config", opts.config_path, "JSON config path")->required();
    else
      sub->add_option("--config", opts.config_path, "JSON config path");
    sub->add_option("--out", opts.out_dir, "output directory");
    sub->add_option("--workers", opts.workers, "parallel replica workers");
    auto* seed_opt = sub->add_option("--seed", opts.seed, "seed override");
    sub->callback([&, name, seed_opt] {
      cmd_name = name;
      opts.seed_override = seed_opt->count() > 0;
    });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_name == "gauge") return cmd_gauge(opts);
    if (cmd_name == "simulate") return cmd_simulate(opts);
    if (cmd_name == "zeros") return cmd_zeros(opts);
    if (cmd_name == "dimension") return cmd_dimension(opts);
    if (cmd_name == "dichotomy") return cmd_dichotomy(opts);
    if (cmd_name == "capacity") return cmd_capacity(opts);
    if (cmd_name == "validate") return cmd_validate(opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 2;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const std::runtime_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
