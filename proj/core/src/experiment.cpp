#include "mkvnet/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mkvnet/mlp.hpp"
#include "mkvnet/network.hpp"
#include "mkvnet/noise_tree.hpp"
#include "mkvnet/oracle.hpp"
#include "mkvnet/params.hpp"
#include "mkvnet/synthesis.hpp"

namespace mkvnet {

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const std::string t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw std::invalid_argument("config: bad value for '" + key + "': '" + t + "'");
  }
  return value;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_number<T>(key, item));
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt(std::uint64_t v) { return std::to_string(v); }

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
      : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double relative_gap(std::span<const double> got, std::span<const double> want) {
  double gap = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) gap = std::max(gap, std::abs(got[i] - want[i]));
  return gap / std::max(1.0, max_abs(want));
}

std::vector<double> scaled_halton(std::uint64_t i, std::size_t d, double lo, double hi) {
  std::vector<double> x = halton_point(i, d);
  for (double& v : x) v = lo + (hi - lo) * v;
  return x;
}

struct Tally {
  std::ostream& log;
  bool ok = true;
  void check(bool pass, const std::string& what) {
    log << (pass ? "PASS " : "FAIL ") << what << '\n';
    ok = ok && pass;
  }
};

void run_equivalence(const ExperimentConfig& cfg, std::uint64_t seed,
                     const std::filesystem::path& out, Tally& tally) {
  CsvWriter csv(out / "equivalence.csv",
                {"kind", "problem", "d", "n", "m", "K", "seed", "max_rel_error", "depth",
                 "predicted_depth", "width", "width_bound", "param_count", "pass"});
  std::filesystem::create_directories(out / "networks");
  for (std::size_t d : cfg.dims) {
    const TestProblem problem = make_problem(cfg, d, cfg.horizon);
    for (unsigned n : cfg.levels) {
      const unsigned m = std::max(n, 1u);
      bool all_pass = true;
      for (std::size_t s = 0; s < cfg.seed_count; ++s) {
        const std::uint64_t sd = seed + s;
        const NoiseTree tree(sd, problem.T, d, n, m);
        auto record = [&](const std::string& kind, std::uint64_t K, const SynthesisReport& rep,
                          double err) {
          const bool pass = err <= cfg.tolerance && rep.depth == rep.predicted_depth &&
                            rep.width_supnorm <= rep.predicted_width_bound;
          all_pass = all_pass && pass;
          csv.row({kind, problem.id, fmt(std::uint64_t{d}), fmt(std::uint64_t{n}),
                   fmt(std::uint64_t{m}), fmt(K), fmt(sd), fmt(err), fmt(std::uint64_t{rep.depth}),
                   fmt(std::uint64_t{rep.predicted_depth}), fmt(std::uint64_t{rep.width_supnorm}),
                   fmt(rep.predicted_width_bound), fmt(rep.param_count), pass ? "1" : "0"});
          if (s == 0 && rep.param_count <= 100000) {
            std::ofstream net(out / "networks" /
                                  (kind + "_" + problem.id + "_d" + std::to_string(d) + "_n" +
                                   std::to_string(n) + "_K" + std::to_string(K) + ".txt"),
                              std::ios::binary);
            write_text(net, rep.network);
          }
        };

        const ThetaIndex theta{1};
        const SynthesisReport mlp_rep =
            synthesize_mlp_network(problem, tree, theta, n, m, problem.T);
        double err = 0.0;
        for (std::size_t i = 1; i <= cfg.probes; ++i) {
          const auto x = scaled_halton(i, d, -2.0, 2.0);
          err = std::max(err, relative_gap(realize(mlp_rep.network, x),
                                           mlp_estimate(problem, tree, theta, n, m, problem.T, x)));
        }
        record("mlp", 1, mlp_rep, err);

        for (std::uint64_t K : cfg.samples) {
          const SynthesisReport mc_rep = synthesize_mc_network(problem, tree, K, n, m);
          double mc_err = 0.0;
          for (std::size_t i = 1; i <= cfg.probes; ++i) {
            const auto x = scaled_halton(i, d, -2.0, 2.0);
            const double want[] = {monte_carlo_payoff(problem, tree, K, n, m, x)};
            mc_err = std::max(mc_err, relative_gap(realize(mc_rep.network, x), want));
          }
          record("mc", K, mc_rep, mc_err);
        }
      }
      tally.check(all_pass, "equivalence d=" + std::to_string(d) + " n=m=" + std::to_string(n));
    }
  }
}

void run_bounds(const ExperimentConfig& cfg, std::uint64_t seed, const std::filesystem::path& out,
                Tally& tally) {
  CsvWriter csv(out / "bounds.csv", {"problem", "bound_name", "d", "p", "r", "eps", "empirical",
                                     "upper99", "bound", "satisfied", "samples"});
  auto emit = [&](const std::string& problem, const BoundCheckResult& r, std::size_t d, unsigned p,
                  unsigned rr, double eps) {
    const bool pass = r.satisfied && r.confident();
    csv.row({problem, r.name, fmt(std::uint64_t{d}), fmt(std::uint64_t{p}), fmt(std::uint64_t{rr}),
             fmt(eps), fmt(r.empirical), fmt(r.upper), fmt(r.bound), pass ? "1" : "0",
             fmt(std::uint64_t{r.samples})});
    tally.check(pass, r.name + " problem=" + problem + " d=" + std::to_string(d) +
                          " p=" + std::to_string(p) + " eps=" + fmt(eps) + ": " +
                          fmt(r.upper) + " <= " + fmt(r.bound));
  };

  for (std::size_t d : {1u, 3u, 5u}) {
    for (unsigned p : {1u, 2u}) {
      for (unsigned r : {1u, 2u}) {
        emit("brownian", check_brownian_moment(d, p, r, cfg.horizon, cfg.brownian_samples, seed), d,
             p, r, 0.0);
      }
    }
  }

  ParticleConfig pc;
  pc.particles = cfg.particles;
  pc.euler_steps = cfg.euler_steps;
  pc.partners = cfg.partners;
  pc.master_seed = seed;
  for (std::size_t d : cfg.dims) {
    const TestProblem problem = make_problem(cfg, d, cfg.horizon);
    const std::vector<double> x(d, 1.0);
    ParticleSystem base(problem, pc, x);
    base.run();
    for (unsigned p : {1u, 2u}) emit(problem.id, check_moment_bound(base, x, p), d, p, problem.r, 0.0);
    for (double eps : cfg.perturbations) {
      const TestProblem pert = perturb(problem, eps);
      const auto [state, payoff] = check_perturbation_bounds(base, pert, eps, x, 2);
      emit(problem.id, state, d, 2, problem.r, eps);
      emit(problem.id, payoff, d, 2, problem.r, eps);
    }
    emit(problem.id,
         check_mlp_error_domination(problem, pc, 2, 2, x, cfg.mlp_error_seeds, seed), d, 2,
         problem.r, 0.0);
  }
}

void run_convergence(const ExperimentConfig& cfg, std::uint64_t seed,
                     const std::filesystem::path& out, Tally& tally) {
  CsvWriter csv(out / "convergence.csv", {"d", "seed", "n", "K", "rms_error", "rms_reference"});
  const unsigned top = cfg.convergence_max_level;
  for (std::size_t d : cfg.convergence_dims) {
    const TestProblem problem = make_problem(cfg, d, cfg.horizon);
    if (!problem.closed_form) throw std::invalid_argument("convergence suite needs a closed form");
    std::size_t decreased = 0;
    double top_err2 = 0.0;
    double top_ref2 = 0.0;
    for (std::size_t s = 0; s < cfg.convergence_seeds; ++s) {
      const std::uint64_t sd = seed + s;
      std::vector<double> rms(top + 1, 0.0);
      for (unsigned n = 1; n <= top; ++n) {
        const NoiseTree tree(sd, problem.T, d, n, n);
        double e2 = 0.0;
        double r2 = 0.0;
        for (std::size_t i = 1; i <= cfg.convergence_probes; ++i) {
          const auto x = scaled_halton(i, d, 0.5, 1.5);
          const double ref = (*problem.closed_form)(x, problem.T);
          const double est = monte_carlo_payoff(problem, tree, cfg.convergence_samples, n, n, x);
          e2 += (est - ref) * (est - ref);
          r2 += ref * ref;
        }
        const auto P = static_cast<double>(cfg.convergence_probes);
        rms[n] = std::sqrt(e2 / P);
        csv.row({fmt(std::uint64_t{d}), fmt(sd), fmt(std::uint64_t{n}),
                 fmt(cfg.convergence_samples), fmt(rms[n]), fmt(std::sqrt(r2 / P))});
        if (n == top) {
          top_err2 += e2;
          top_ref2 += r2;
        }
      }
      if (top >= 2 && rms[top] < rms[1]) ++decreased;
    }
    const double frac = static_cast<double>(decreased) / static_cast<double>(cfg.convergence_seeds);
    const double rel = std::sqrt(top_err2 / top_ref2);
    tally.check(frac >= 0.9, "convergence d=" + std::to_string(d) + " error decreases n=1->" +
                                 std::to_string(top) + " in " + fmt(frac) + " of seeds (>= 0.9)");
    tally.check(rel <= 0.1, "convergence d=" + std::to_string(d) + " relative error at n=" +
                                std::to_string(top) + " = " + fmt(rel) + " (<= 0.1)");
  }
}

void run_scaling(const ExperimentConfig& cfg, std::uint64_t seed, const std::filesystem::path& out,
                 Tally& tally) {
  CsvWriter csv(out / "scaling.csv",
                {"mode", "d", "epsilon", "delta", "small_epsilon", "selected_N", "levels",
                 "log10_K", "log10_params", "log10_param_bound", "status", "measured_l2_error",
                 "error_ok", "params_ok"});
  PipelineOptions base;
  base.probe_points = cfg.quadrature_points;
  base.max_params = cfg.max_params;
  base.seeds.clear();
  for (std::size_t s = 0; s < cfg.seed_count; ++s) base.seeds.push_back(seed + s);

  const double ln10 = std::log(10.0);
  const double slope_cap = 3.0 * cfg.scaling_c + 8.0 + cfg.delta + 0.5;
  for (std::size_t d : cfg.scaling_dims) {
    TestProblem problem = make_problem(cfg, d, cfg.scaling_horizon);
    problem.c = cfg.scaling_c;
    problem.r = cfg.scaling_r;
    std::vector<std::pair<double, double>> points;
    for (const bool desk : {false, true}) {
      for (double eps : cfg.epsilons) {
        PipelineOptions opts = base;
        if (desk) {
          opts.fixed_levels = cfg.desk_levels;
          opts.fixed_samples = cfg.desk_samples;
        }
        const PipelineResult r = theorem_pipeline(problem, eps, cfg.delta, opts);
        const long double log_params = std::log(r.predicted_params);
        const bool error_ok = r.status == PipelineStatus::ok && r.measured_error < eps;
        const bool params_ok = log_params <= r.log_param_bound;
        csv.row({desk ? "desk" : "theorem", fmt(std::uint64_t{d}), fmt(eps), fmt(cfg.delta),
                 fmt(r.small_epsilon), fmt(std::uint64_t{r.selected_N}),
                 fmt(std::uint64_t{r.levels}),
                 fmt(static_cast<double>(std::log(r.samples) / ln10)),
                 fmt(static_cast<double>(log_params / ln10)),
                 fmt(static_cast<double>(r.log_param_bound / ln10)), to_string(r.status),
                 fmt(r.measured_error), error_ok ? "1" : "0", params_ok ? "1" : "0"});
        if (desk) continue;
        points.emplace_back(std::log(1.0 / eps), static_cast<double>(log_params));
        tally.check(error_ok, "scaling d=" + std::to_string(d) + " eps=" + fmt(eps) + " N=" +
                                  std::to_string(r.selected_N) + " status=" +
                                  to_string(r.status) + " L2 error < eps");
        tally.check(params_ok, "scaling d=" + std::to_string(d) + " eps=" + fmt(eps) +
                                   " param_count <= param_bound");
      }
    }
    if (points.size() >= 2) {
      double mx = 0.0, my = 0.0;
      for (const auto& [px, py] : points) {
        mx += px;
        my += py;
      }
      mx /= static_cast<double>(points.size());
      my /= static_cast<double>(points.size());
      double sxy = 0.0, sxx = 0.0;
      for (const auto& [px, py] : points) {
        sxy += (px - mx) * (py - my);
        sxx += (px - mx) * (px - mx);
      }
      const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
      tally.check(slope <= slope_cap, "scaling d=" + std::to_string(d) + " slope " + fmt(slope) +
                                          " <= " + fmt(slope_cap));
    }
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (dims.empty()) throw std::invalid_argument("config: d list is empty");
  for (std::size_t d : dims) {
    if (d == 0) throw std::invalid_argument("config: d must be positive");
  }
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("config: delta must be in (0,1)");
  if (epsilons.empty()) throw std::invalid_argument("config: epsilon list is empty");
  for (double e : epsilons) {
    if (!(e > 0.0 && e < 1.0)) throw std::invalid_argument("config: epsilon must be in (0,1)");
  }
  if (problem != "linear" && problem != "relu" && problem != "constant") {
    throw std::invalid_argument("config: unknown problem '" + problem + "'");
  }
  if (!(horizon > 0.0) || !(scaling_horizon > 0.0)) {
    throw std::invalid_argument("config: horizons must be positive");
  }
  if (seed_count == 0) throw std::invalid_argument("config: seed_count must be positive");
  for (std::uint64_t K : samples) {
    if (K == 0) throw std::invalid_argument("config: samples must be positive");
  }
  if (convergence_seeds == 0 || convergence_probes == 0 || convergence_samples == 0) {
    throw std::invalid_argument("config: convergence counts must be positive");
  }
  if (probes == 0 || quadrature_points == 0) {
    throw std::invalid_argument("config: probe counts must be positive");
  }
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"problem", [&](auto&, auto& v) { c.problem = trim(v); }},
      {"d", [&](auto& k, auto& v) { c.dims = parse_list<std::size_t>(k, v); }},
      {"epsilon", [&](auto& k, auto& v) { c.epsilons = parse_list<double>(k, v); }},
      {"delta", [&](auto& k, auto& v) { c.delta = parse_number<double>(k, v); }},
      {"seed", [&](auto& k, auto& v) { c.seed = parse_number<std::uint64_t>(k, v); }},
      {"seed_count", [&](auto& k, auto& v) { c.seed_count = parse_number<std::size_t>(k, v); }},
      {"output", [&](auto&, auto& v) { c.output = trim(v); }},
      {"drift_a", [&](auto& k, auto& v) { c.drift_a = parse_number<double>(k, v); }},
      {"drift_b", [&](auto& k, auto& v) { c.drift_b = parse_number<double>(k, v); }},
      {"T", [&](auto& k, auto& v) { c.horizon = parse_number<double>(k, v); }},
      {"levels", [&](auto& k, auto& v) { c.levels = parse_list<unsigned>(k, v); }},
      {"samples", [&](auto& k, auto& v) { c.samples = parse_list<std::uint64_t>(k, v); }},
      {"probes", [&](auto& k, auto& v) { c.probes = parse_number<std::size_t>(k, v); }},
      {"tolerance", [&](auto& k, auto& v) { c.tolerance = parse_number<double>(k, v); }},
      {"particles", [&](auto& k, auto& v) { c.particles = parse_number<std::size_t>(k, v); }},
      {"euler_steps", [&](auto& k, auto& v) { c.euler_steps = parse_number<unsigned>(k, v); }},
      {"partners", [&](auto& k, auto& v) { c.partners = parse_number<std::size_t>(k, v); }},
      {"brownian_samples",
       [&](auto& k, auto& v) { c.brownian_samples = parse_number<std::size_t>(k, v); }},
      {"perturbations", [&](auto& k, auto& v) { c.perturbations = parse_list<double>(k, v); }},
      {"mlp_error_seeds",
       [&](auto& k, auto& v) { c.mlp_error_seeds = parse_number<std::size_t>(k, v); }},
      {"convergence_d",
       [&](auto& k, auto& v) { c.convergence_dims = parse_list<std::size_t>(k, v); }},
      {"convergence_samples",
       [&](auto& k, auto& v) { c.convergence_samples = parse_number<std::uint64_t>(k, v); }},
      {"convergence_seeds",
       [&](auto& k, auto& v) { c.convergence_seeds = parse_number<std::size_t>(k, v); }},
      {"convergence_probes",
       [&](auto& k, auto& v) { c.convergence_probes = parse_number<std::size_t>(k, v); }},
      {"convergence_max_level",
       [&](auto& k, auto& v) { c.convergence_max_level = parse_number<unsigned>(k, v); }},
      {"scaling_d", [&](auto& k, auto& v) { c.scaling_dims = parse_list<std::size_t>(k, v); }},
      {"scaling_c", [&](auto& k, auto& v) { c.scaling_c = parse_number<double>(k, v); }},
      {"scaling_r", [&](auto& k, auto& v) { c.scaling_r = parse_number<unsigned>(k, v); }},
      {"scaling_T", [&](auto& k, auto& v) { c.scaling_horizon = parse_number<double>(k, v); }},
      {"quadrature_points",
       [&](auto& k, auto& v) { c.quadrature_points = parse_number<std::size_t>(k, v); }},
      {"max_params", [&](auto& k, auto& v) { c.max_params = parse_number<double>(k, v); }},
      {"desk_levels", [&](auto& k, auto& v) { c.desk_levels = parse_number<unsigned>(k, v); }},
      {"desk_samples",
       [&](auto& k, auto& v) { c.desk_samples = parse_number<std::uint64_t>(k, v); }},
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" +
                                  key + "'");
    }
    it->second(key, line.substr(eq + 1));
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path.string());
  return parse_config(in);
}

std::optional<Suite> parse_suite(const std::string& name) {
  if (name == "equivalence") return Suite::equivalence;
  if (name == "bounds") return Suite::bounds;
  if (name == "convergence") return Suite::convergence;
  if (name == "scaling") return Suite::scaling;
  if (name == "all") return Suite::all;
  return std::nullopt;
}

TestProblem make_problem(const ExperimentConfig& config, std::size_t d, double T) {
  if (config.problem == "linear") return linear_problem(d, config.drift_a, config.drift_b, T);
  if (config.problem == "relu") return relu_problem(d, config.seed, T);
  if (config.problem == "constant") return constant_problem(d, 1.0, T);
  throw std::invalid_argument("unknown problem '" + config.problem + "'");
}

int run_suite(const ExperimentConfig& config, Suite suite, std::uint64_t seed,
              const std::filesystem::path& out_dir, std::ostream& log) {
  config.validate();
  std::filesystem::create_directories(out_dir);
  Tally tally{log};
  const bool all = suite == Suite::all;
  if (all || suite == Suite::equivalence) run_equivalence(config, seed, out_dir, tally);
  if (all || suite == Suite::bounds) run_bounds(config, seed, out_dir, tally);
  if (all || suite == Suite::convergence) run_convergence(config, seed, out_dir, tally);
  if (all || suite == Suite::scaling) run_scaling(config, seed, out_dir, tally);
  return tally.ok ? 0 : 1;
}

}  // namespace mkvnet
