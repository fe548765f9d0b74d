// Command-line front end. Six subcommands tie the library together:
//   theory        closed-form limit spectral measures
//   sample        Monte Carlo spectra of the four matrix models
//   moments-exact finite-dimension rational trace moments
//   bounds        entropy / additivity-rate / capacity / PPT report
//   ppt           violation scans and the asymptotic order threshold
//   report        theory + sample + bounds with a comparison block
// Artifacts are JSON (and CSV where tabular); identical flags and seed give
// identical bytes. Exit codes: 0 ok, 2 bad flags, 3 refused by a guard,
// 4 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "rqc/bounds.hpp"
#include "rqc/measures.hpp"
#include "rqc/random_matrix.hpp"
#include "rqc/version.hpp"
#include "rqc/weingarten.hpp"

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitBadFlags = 2;
constexpr int kExitGuard = 3;
constexpr int kExitNumerical = 4;

// All flags of one invocation; echoed into every JSON artifact.
struct RunConfig {
  std::string subcommand;
  std::string model;
  int n = 100;
  int k = 2;
  bool k_given = false;
  double t = 0.1;
  bool t_given = false;
  int d = 0;
  bool d_given = false;
  int p_order = 3;           // integer moment order (theory, moments-exact)
  std::string p_text = "1";  // entropy order as text; "inf" allowed
  std::uint64_t seed = 0;
  bool seed_given = false;
  int trials = 10;
  int bins = 200;
  int threads = 0;  // 0 resolves to the hardware count
  bool force = false;
  bool drop_kernel = false;
  bool bits = false;
  std::string out;
  std::string scan_range;
  bool p_threshold = false;
};

double parse_entropy_order(const std::string& text) {
  if (text == "inf" || text == "infinity")
    return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse entropy order '" + text + "'");
  }
  if (used != text.size())
    throw std::invalid_argument("cannot parse entropy order '" + text + "'");
  return v;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

// 12 significant digits, '.' decimal, locale-free: the CSV number format.
std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::string(buf);
}

// JSON value for an entropy order; infinity is spelled out since JSON has
// no literal for it.
json entropy_order_json(double p) {
  if (std::isinf(p)) return json("inf");
  return json(p);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path);
}

// Emits an artifact to stdout when no output prefix was given, otherwise to
// <prefix><suffix> with a note on stderr.
void emit(const std::string& text, const std::string& out_prefix,
          const std::string& suffix) {
  if (out_prefix.empty()) {
    std::cout << text;
    return;
  }
  const std::string path = out_prefix + suffix;
  write_text_file(path, text);
  std::cerr << "wrote " << path << "\n";
}

json config_json(const RunConfig& c) {
  json j;
  j["subcommand"] = c.subcommand;
  if (!c.model.empty()) j["model"] = c.model;
  j["n"] = c.n;
  j["k"] = c.k;
  j["t"] = c.t;
  if (c.d_given) j["d"] = c.d;
  j["p"] = c.p_order;
  j["p_entropy"] = entropy_order_json(parse_entropy_order(c.p_text));
  if (c.seed_given) j["seed"] = c.seed;
  j["trials"] = c.trials;
  j["bins"] = c.bins;
  j["threads"] = resolve_threads(c.threads);
  j["force"] = c.force;
  j["drop_kernel"] = c.drop_kernel;
  j["log_base"] = c.bits ? "bits" : "nats";
  j["version"] = rqc::kVersionString;
  return j;
}

bool model_is_k_free(const std::string& m) {
  return m == "ccgamma" || m == "mgamma-limit";
}

// Closed-form limit measure for the measure-backed models. The finite-k
// mgamma model has a moment route but no closed-form density here.
rqc::SpectralMeasure theory_measure(const std::string& model, int k,
                                    double t) {
  if (model == "c") return rqc::mu_c(k, t);
  if (model == "cgamma") return rqc::mu_c_gamma(k, t);
  if (model == "ccgamma") return rqc::mu_cc_gamma(t);
  if (model == "mgamma-limit") return rqc::mu_m_gamma_limit(t);
  throw std::invalid_argument("model has no closed-form measure: " + model);
}

double theory_norm(const std::string& model, int k, double t) {
  if (model == "c") return rqc::norm_mu_c(k, t);
  if (model == "cgamma") return rqc::norm_mu_c_gamma(k, t);
  if (model == "ccgamma") return rqc::norm_mu_cc_gamma(t);
  if (model == "mgamma-limit") return rqc::norm_mu_m_gamma_limit(t);
  throw std::invalid_argument("model has no closed-form norm: " + model);
}

int cmd_theory(const RunConfig& cfg) {
  static const std::vector<std::string> kModels{"c", "cgamma", "ccgamma",
                                                "mgamma", "mgamma-limit"};
  if (std::find(kModels.begin(), kModels.end(), cfg.model) == kModels.end())
    throw std::invalid_argument("unknown theory model: " + cfg.model);
  if (!cfg.t_given) throw std::invalid_argument("theory requires --t");
  if (!model_is_k_free(cfg.model) && !cfg.k_given)
    throw std::invalid_argument("theory model '" + cfg.model +
                                "' requires --k");
  if (cfg.p_order < 1 || cfg.p_order > 12)
    throw std::invalid_argument("theory moment order --p must be in [1,12]");

  json j;
  j["config"] = config_json(cfg);
  j["model"] = cfg.model;
  j["k"] = model_is_k_free(cfg.model) ? json(nullptr) : json(cfg.k);
  j["t"] = cfg.t;

  std::vector<double> moments;
  if (cfg.model == "mgamma") {
    // moment route only: no closed-form measure at finite k
    j["norm"] = nullptr;
    j["atoms"] = nullptr;
    j["has_density"] = false;
    j["support"] = nullptr;
    for (int p = 1; p <= cfg.p_order; ++p)
      moments.push_back(rqc::mu_m_gamma_moments(cfg.k, cfg.t, p));
  } else {
    const rqc::SpectralMeasure mu = theory_measure(cfg.model, cfg.k, cfg.t);
    j["norm"] = theory_norm(cfg.model, cfg.k, cfg.t);
    json atoms = json::array();
    for (const auto& a : mu.atoms)
      atoms.push_back({{"location", a.location}, {"mass", a.mass}});
    j["atoms"] = atoms;
    j["has_density"] = mu.has_density;
    j["support"] = mu.has_density
                       ? json::array({mu.support_lo, mu.support_hi})
                       : json(nullptr);
    for (int p = 1; p <= cfg.p_order; ++p) moments.push_back(mu.moment(p));
  }
  j["moments"] = moments;
  emit(j.dump(2) + "\n", cfg.out, ".json");

  // density table as a separate plot-ready artifact
  if (!cfg.out.empty() && cfg.model != "mgamma") {
    const rqc::SpectralMeasure mu = theory_measure(cfg.model, cfg.k, cfg.t);
    if (mu.has_density) {
      std::string csv = "x,density\n";
      const int grid = 501;
      for (int i = 0; i < grid; ++i) {
        const double x = mu.support_lo +
                         (mu.support_hi - mu.support_lo) * i / (grid - 1.0);
        csv += fmt12(x) + "," + fmt12(mu.density(x)) + "\n";
      }
      emit(csv, cfg.out, ".csv");
    }
  }
  return kExitOk;
}

rqc::SampleModel parse_sample_model(const std::string& m) {
  if (m == "c") return rqc::SampleModel::c;
  if (m == "cgamma") return rqc::SampleModel::c_gamma;
  if (m == "ccgamma") return rqc::SampleModel::cc_gamma;
  if (m == "mgamma") return rqc::SampleModel::m_gamma;
  throw std::invalid_argument("model is not sampleable: " + m);
}

json sample_result_json(const rqc::SampleResult& res) {
  json j;
  j["n"] = res.n;
  j["k"] = res.k;
  j["d"] = res.d;
  j["t"] = res.t;
  j["matrix_dim"] = res.matrix_dim;
  j["bin_edges"] = res.edges;
  j["counts"] = res.counts;
  json trials = json::array();
  std::vector<double> max_abs;
  for (std::size_t i = 0; i < res.trial_stats.size(); ++i) {
    const auto& s = res.trial_stats[i];
    trials.push_back({{"trial", i},
                      {"min_eig", s.min_eig},
                      {"max_eig", s.max_eig},
                      {"moments", {s.moments[0], s.moments[1], s.moments[2]}}});
    max_abs.push_back(std::max(std::abs(s.min_eig), std::abs(s.max_eig)));
  }
  j["trials"] = trials;
  std::sort(max_abs.begin(), max_abs.end());
  const std::size_t m = max_abs.size();
  j["median_max_abs_eigenvalue"] =
      m % 2 == 1 ? max_abs[m / 2]
                 : 0.5 * (max_abs[m / 2 - 1] + max_abs[m / 2]);
  return j;
}

std::string histogram_csv(const rqc::SampleResult& res) {
  std::string csv = "bin_left,bin_right,count\n";
  for (std::size_t b = 0; b + 1 < res.edges.size(); ++b)
    csv += fmt12(res.edges[b]) + "," + fmt12(res.edges[b + 1]) + "," +
           std::to_string(res.counts[b]) + "\n";
  return csv;
}

rqc::SampleConfig sample_config_from(const RunConfig& cfg) {
  rqc::SampleConfig sc;
  sc.model = parse_sample_model(cfg.model);
  sc.n = cfg.n;
  sc.k = cfg.k;
  sc.t = cfg.t;
  sc.d = cfg.d_given ? cfg.d : 0;
  sc.seed = cfg.seed;
  sc.trials = cfg.trials;
  sc.bins = cfg.bins;
  sc.threads = resolve_threads(cfg.threads);
  sc.force = cfg.force;
  sc.drop_kernel = cfg.drop_kernel;
  return sc;
}

int cmd_sample(const RunConfig& cfg) {
  if (!cfg.seed_given)
    throw std::invalid_argument("sample requires an explicit --seed");
  const rqc::SampleResult res = rqc::monte_carlo_spectrum(sample_config_from(cfg));
  json j;
  j["config"] = config_json(cfg);
  j["model"] = cfg.model;
  j.update(sample_result_json(res));
  emit(j.dump(2) + "\n", cfg.out, ".json");
  if (!cfg.out.empty()) emit(histogram_csv(res), cfg.out, ".csv");
  return kExitOk;
}

int cmd_moments_exact(const RunConfig& cfg) {
  using exact_fn = rqc::bigrat (*)(long long, long long, long long, int);
  exact_fn fn = nullptr;
  if (cfg.model == "c") fn = rqc::exact_moment_choi;
  else if (cfg.model == "cgamma") fn = rqc::exact_moment_choi_gamma;
  else if (cfg.model == "ccgamma") fn = rqc::exact_moment_ccgamma;
  else if (cfg.model == "mgamma") fn = rqc::exact_moment_mgamma;
  else throw std::invalid_argument("unknown exact-moment model: " + cfg.model);

  if (cfg.d_given == cfg.t_given)
    throw std::invalid_argument(
        "moments-exact requires exactly one of --d or --t");
  const long long n = cfg.n, k = cfg.k;
  const long long d =
      cfg.d_given ? cfg.d
                  : std::llround(cfg.t * static_cast<double>(n) *
                                 static_cast<double>(k));
  if (cfg.p_order < 1 || cfg.p_order > 7)
    throw std::invalid_argument("exact moment order --p must be in [1,7]");

  json rows = json::array();
  for (int p = 1; p <= cfg.p_order; ++p) {
    const rqc::bigrat r = fn(n, k, d, p);
    rows.push_back({{"p", p},
                    {"numerator", boost::multiprecision::numerator(r).str()},
                    {"denominator",
                     boost::multiprecision::denominator(r).str()},
                    {"float", r.convert_to<double>()}});
  }
  json j;
  j["config"] = config_json(cfg);
  j["model"] = cfg.model;
  j["n"] = n;
  j["k"] = k;
  j["d"] = d;
  j["moments"] = rows;
  emit(j.dump(2) + "\n", cfg.out, ".json");
  return kExitOk;
}

// Rescales the entropy-like fields of a bound report when bits are requested;
// norms, rates, thresholds, and eigenvalues are base-free.
json bound_report_json(const rqc::BoundReport& r, bool bits) {
  const rqc::log_base base = bits ? rqc::log_base::two : rqc::log_base::natural;
  json j;
  j["k"] = r.k;
  j["t"] = r.t;
  j["p"] = entropy_order_json(r.p);
  j["log_base"] = bits ? "bits" : "nats";
  j["norm_c"] = r.norm_c;
  j["norm_c_gamma"] = r.norm_c_gamma;
  j["norm_cc_gamma"] = r.norm_cc_gamma;
  j["norm_m_gamma"] = r.norm_m_gamma;
  j["l_identity_per_n"] = r.l_identity_per_n;
  j["h"] = rqc::rescale_log(r.h, base);
  j["h_is_upper_bound_only"] = r.h_is_upper_bound_only;
  j["alpha_gamma_lower"] = r.alpha_gamma_lower;
  j["v"] = r.v;
  j["pair_rate_lower"] = r.pair_rate_lower;
  j["capacity_lower"] = rqc::rescale_log(r.capacity_lower, base);
  j["capacity_upper"] = rqc::rescale_log(r.capacity_upper, base);
  j["t_ppt"] = r.t_ppt_value;
  j["ppt_in_limit"] = r.ppt_in_limit;
  j["ppt_margin"] = r.ppt_margin;
  j["min_eig_limit"] = r.min_eig_limit;
  return j;
}

int cmd_bounds(const RunConfig& cfg) {
  if (!cfg.k_given || !cfg.t_given)
    throw std::invalid_argument("bounds requires --k and --t");
  const double p = parse_entropy_order(cfg.p_text);
  const rqc::BoundReport r = rqc::bound_report(cfg.k, cfg.t, p);
  json j;
  j["config"] = config_json(cfg);
  j.update(bound_report_json(r, cfg.bits));
  emit(j.dump(2) + "\n", cfg.out, ".json");
  return kExitOk;
}

int cmd_ppt(const RunConfig& cfg) {
  if (cfg.scan_range.empty() == !cfg.p_threshold)
    throw std::invalid_argument(
        "ppt requires exactly one of --scan-k lo:hi or --p-threshold");
  if (cfg.p_threshold) {
    json j;
    j["config"] = config_json(cfg);
    j["p_threshold"] = rqc::ppt_violation_p_threshold();
    emit(j.dump(2) + "\n", cfg.out, ".json");
    return kExitOk;
  }
  long long lo = 0, hi = 0;
  if (std::sscanf(cfg.scan_range.c_str(), "%lld:%lld", &lo, &hi) != 2)
    throw std::invalid_argument("--scan-k expects lo:hi, got '" +
                                cfg.scan_range + "'");
  const rqc::ppt_scan_result scan = rqc::ppt_violation_k_scan(lo, hi);
  std::string csv =
      "# minimal_violating_k=" + std::to_string(scan.minimal_violating_k) +
      "\n" + "k,t,tensor_value,single_value_sq,violated\n";
  for (const auto& row : scan.rows)
    csv += std::to_string(row.k) + "," + fmt12(row.t) + "," +
           fmt12(row.tensor_value) + "," + fmt12(row.single_value_sq) + "," +
           (row.violated ? "true" : "false") + "\n";
  emit(csv, cfg.out, ".csv");
  return kExitOk;
}

int cmd_report(const RunConfig& cfg) {
  if (!cfg.k_given || !cfg.t_given)
    throw std::invalid_argument("report requires --k and --t");
  if (!cfg.seed_given)
    throw std::invalid_argument("report requires an explicit --seed");
  const double p = parse_entropy_order(cfg.p_text);

  json j;
  j["config"] = config_json(cfg);

  // closed-form norms; the complementary and projector models carry their
  // large-k limit values, the Choi models are exact at this k
  json theory;
  theory["norm_c"] = rqc::norm_mu_c(cfg.k, cfg.t);
  theory["norm_c_gamma"] = rqc::norm_mu_c_gamma(cfg.k, cfg.t);
  theory["norm_cc_gamma_large_k"] = rqc::norm_mu_cc_gamma(cfg.t);
  theory["norm_m_gamma_large_k"] = rqc::norm_mu_m_gamma_limit(cfg.t);
  j["theory"] = theory;

  // sample the two models whose limit law is exact at fixed k
  json sample;
  json comparison;
  for (const std::string model : {std::string("c"), std::string("cgamma")}) {
    RunConfig mc = cfg;
    mc.model = model;
    const rqc::SampleResult res =
        rqc::monte_carlo_spectrum(sample_config_from(mc));
    const json sj = sample_result_json(res);
    sample[model] = sj;
    const double observed = sj["median_max_abs_eigenvalue"].get<double>();
    const double expected = theory_norm(model, cfg.k, cfg.t);
    comparison[model] = {{"theory_norm", expected},
                         {"observed_median_norm", observed},
                         {"abs_deviation", std::abs(observed - expected)},
                         {"theory_is_large_k_limit", false}};
  }
  j["sample"] = sample;
  comparison["ccgamma"] = {{"theory_norm", rqc::norm_mu_cc_gamma(cfg.t)},
                           {"observed_median_norm", nullptr},
                           {"abs_deviation", nullptr},
                           {"theory_is_large_k_limit", true}};
  comparison["mgamma"] = {{"theory_norm", rqc::norm_mu_m_gamma_limit(cfg.t)},
                          {"observed_median_norm", nullptr},
                          {"abs_deviation", nullptr},
                          {"theory_is_large_k_limit", true}};
  j["comparison"] = comparison;
  j["bounds"] = bound_report_json(rqc::bound_report(cfg.k, cfg.t, p), cfg.bits);
  emit(j.dump(2) + "\n", cfg.out, ".json");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"random quantum channel spectra, moments, and bounds"};
  app.require_subcommand(1);

  auto add_common = [&cfg](CLI::App* cmd) {
    cmd->add_option("--k", cfg.k, "output dimension")
        ->check(CLI::PositiveNumber)
        ->trigger_on_parse();
    cmd->add_option("--t", cfg.t, "input aspect ratio t = d/(nk), in (0,1)");
    cmd->add_option("--out", cfg.out,
                    "output path prefix; artifacts get .json/.csv suffixes");
    cmd->add_flag("--bits", cfg.bits, "report entropies in bits, not nats");
  };

  CLI::App* c_theory = app.add_subcommand(
      "theory", "closed-form limit spectral measure of one matrix model");
  add_common(c_theory);
  c_theory->add_option("--model", cfg.model,
                       "c | cgamma | ccgamma | mgamma | mgamma-limit")
      ->required();
  c_theory->add_option("--p", cfg.p_order, "highest moment order (1..12)");

  CLI::App* c_sample = app.add_subcommand(
      "sample", "Monte Carlo spectrum histogram of one matrix model");
  add_common(c_sample);
  c_sample->add_option("--model", cfg.model, "c | cgamma | ccgamma | mgamma")
      ->required();
  c_sample->add_option("--n", cfg.n, "environment dimension")
      ->check(CLI::PositiveNumber);
  auto* sample_d = c_sample->add_option(
      "--d", cfg.d, "input dimension (alternative to --t)");
  c_sample->add_option("--seed", cfg.seed, "RNG seed (required)");
  c_sample->add_option("--trials", cfg.trials, "independent channel draws")
      ->check(CLI::PositiveNumber);
  c_sample->add_option("--bins", cfg.bins, "histogram bins")
      ->check(CLI::PositiveNumber);
  c_sample->add_option("--threads", cfg.threads,
                       "worker threads (default: hardware count)");
  c_sample->add_flag("--force", cfg.force, "override the size guards");
  c_sample->add_flag("--drop-kernel", cfg.drop_kernel,
                     "drop the structural kernel eigenvalues (model c)");

  CLI::App* c_moments = app.add_subcommand(
      "moments-exact", "finite-dimension rational trace moments");
  add_common(c_moments);
  c_moments->add_option("--model", cfg.model, "c | cgamma | ccgamma | mgamma")
      ->required();
  c_moments->add_option("--n", cfg.n, "environment dimension")
      ->check(CLI::PositiveNumber);
  auto* moments_d = c_moments->add_option(
      "--d", cfg.d, "input dimension (alternative to --t)");
  c_moments->add_option("--p", cfg.p_order, "highest moment order (1..7)");

  CLI::App* c_bounds = app.add_subcommand(
      "bounds", "entropy, additivity-rate, capacity, and PPT bound report");
  add_common(c_bounds);
  c_bounds->add_option("--p", cfg.p_text, "entropy order (>= 0 or 'inf')");

  CLI::App* c_ppt = app.add_subcommand(
      "ppt", "PPT-violation scans: --scan-k lo:hi or --p-threshold");
  add_common(c_ppt);
  c_ppt->add_option("--scan-k", cfg.scan_range,
                    "scan k over lo:hi at t = 1/(4k^2)");
  c_ppt->add_flag("--p-threshold", cfg.p_threshold,
                  "print the asymptotic violating entropy order");

  CLI::App* c_report = app.add_subcommand(
      "report", "combined theory + sample + bounds JSON for one (k, t, p)");
  add_common(c_report);
  c_report->add_option("--p", cfg.p_text, "entropy order (>= 0 or 'inf')");
  c_report->add_option("--n", cfg.n, "environment dimension")
      ->check(CLI::PositiveNumber);
  c_report->add_option("--seed", cfg.seed, "RNG seed (required)");
  c_report->add_option("--trials", cfg.trials, "independent channel draws")
      ->check(CLI::PositiveNumber);
  c_report->add_option("--bins", cfg.bins, "histogram bins")
      ->check(CLI::PositiveNumber);
  c_report->add_option("--threads", cfg.threads,
                       "worker threads (default: hardware count)");
  c_report->add_flag("--force", cfg.force, "override the size guards");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadFlags;
  }

  // flag bookkeeping that CLI11 tracks per subcommand
  CLI::App* sub = app.get_subcommands().front();
  cfg.subcommand = sub->get_name();
  auto given = [sub](const std::string& name) {
    const CLI::Option* o = sub->get_option_no_throw(name);
    return o != nullptr && o->count() > 0;
  };
  cfg.k_given = given("--k");
  cfg.t_given = given("--t");
  cfg.seed_given = given("--seed");
  cfg.d_given = (sub == c_sample && sample_d->count() > 0) ||
                (sub == c_moments && moments_d->count() > 0);
  if (cfg.d_given && cfg.t_given) {
    std::cerr << "error: --d and --t are mutually exclusive\n";
    return kExitBadFlags;
  }

  try {
    if (sub == c_theory) return cmd_theory(cfg);
    if (sub == c_sample) return cmd_sample(cfg);
    if (sub == c_moments) return cmd_moments_exact(cfg);
    if (sub == c_bounds) return cmd_bounds(cfg);
    if (sub == c_ppt) return cmd_ppt(cfg);
    if (sub == c_report) return cmd_report(cfg);
    std::cerr << "error: unknown subcommand\n";
    return kExitBadFlags;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadFlags;
  } catch (const std::domain_error& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitGuard;
  } catch (const std::length_error& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitGuard;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}
