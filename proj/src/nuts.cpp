#include "critic/nuts.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "critic/math.hpp"
#include "critic/parallel.hpp"
#include "critic/rng.hpp"

namespace critic {

using json = nlohmann::json;

int Chains::total_divergences() const {
  int n = 0;
  for (int d : divergences) n += d;
  return n;
}

double Chains::divergence_rate() const {
  const double total = static_cast<double>(num_chains()) * static_cast<double>(iters_per_chain());
  return total > 0.0 ? total_divergences() / total : 0.0;
}

namespace {

constexpr double kMaxEnergyError = 1000.0;

struct PhasePoint {
  Eigen::VectorXd q;
  Eigen::VectorXd p;
  Eigen::VectorXd grad;
  double logp = 0.0;
};

struct Hamiltonian {
  const TargetDensity* target;
  Eigen::VectorXd inv_mass;  // posterior-variance estimate; multiplies p

  double kinetic(const Eigen::VectorXd& p) const {
    return 0.5 * (p.array().square() * inv_mass.array()).sum();
  }
  // negative total energy -H = logp - kinetic
  double joint(const PhasePoint& z) const { return z.logp - kinetic(z.p); }

  void refresh(PhasePoint& z) const {
    z.logp = target->logp_and_grad(z.q, z.grad);
  }
  void leapfrog(PhasePoint& z, double eps) const {
    z.p += 0.5 * eps * z.grad;
    z.q += eps * (z.p.array() * inv_mass.array()).matrix();
    refresh(z);
    z.p += 0.5 * eps * z.grad;
  }
  Eigen::VectorXd p_sharp(const PhasePoint& z) const {
    return (z.p.array() * inv_mass.array()).matrix();
  }
};

struct Subtree {
  PhasePoint minus;  // backwardmost state in trajectory order
  PhasePoint plus;   // forwardmost state
  Eigen::VectorXd rho;
  Eigen::VectorXd prop_q;
  Eigen::VectorXd prop_grad;
  double prop_logp = 0.0;
  double log_sum_weight = kNegInf;
  double sum_accept = 0.0;
  long n_states = 0;
  bool divergent = false;
  bool turned = false;
};

bool uturn(const Hamiltonian& h, const PhasePoint& minus, const PhasePoint& plus) {
  const Eigen::VectorXd span = plus.q - minus.q;
  return span.dot(h.p_sharp(minus)) < 0.0 || span.dot(h.p_sharp(plus)) < 0.0;
}

Subtree build_tree(const Hamiltonian& h, const PhasePoint& start, double eps_signed, int depth,
                   double h0, Rng& rng) {
  if (depth == 0) {
    Subtree t;
    PhasePoint z = start;
    h.leapfrog(z, eps_signed);
    const double w = std::isfinite(z.logp) ? h.joint(z) - h0 : kNegInf;  // -(H - H0)
    t.divergent = !(w > -kMaxEnergyError);
    t.log_sum_weight = t.divergent ? kNegInf : w;
    t.sum_accept = std::isfinite(w) ? std::min(1.0, std::exp(w)) : 0.0;
    t.n_states = 1;
    t.rho = z.p;
    t.prop_q = z.q;
    t.prop_grad = z.grad;
    t.prop_logp = z.logp;
    t.minus = z;
    t.plus = std::move(z);
    return t;
  }

  Subtree first = build_tree(h, start, eps_signed, depth - 1, h0, rng);
  if (first.divergent || first.turned) return first;

  const PhasePoint& edge = eps_signed > 0.0 ? first.plus : first.minus;
  Subtree second = build_tree(h, edge, eps_signed, depth - 1, h0, rng);

  Subtree t;
  t.n_states = first.n_states + second.n_states;
  t.sum_accept = first.sum_accept + second.sum_accept;
  t.divergent = second.divergent;
  t.turned = second.turned;
  t.log_sum_weight =
      log_sum_exp(Eigen::Vector2d(first.log_sum_weight, second.log_sum_weight));
  // multinomial sampling within the subtree
  const double take_second = std::exp(second.log_sum_weight - t.log_sum_weight);
  if (std::isfinite(take_second) && runif(rng) < take_second) {
    t.prop_q = second.prop_q;
    t.prop_grad = second.prop_grad;
    t.prop_logp = second.prop_logp;
  } else {
    t.prop_q = first.prop_q;
    t.prop_grad = first.prop_grad;
    t.prop_logp = first.prop_logp;
  }
  if (eps_signed > 0.0) {
    t.minus = first.minus;
    t.plus = second.plus;
  } else {
    t.minus = second.minus;
    t.plus = first.plus;
  }
  t.rho = first.rho + second.rho;
  if (!t.divergent && !t.turned) t.turned = uturn(h, t.minus, t.plus);
  return t;
}

struct TransitionResult {
  double accept_stat = 0.0;
  bool divergent = false;
};

TransitionResult nuts_transition(const Hamiltonian& h, PhasePoint& z, double eps, int max_depth,
                                 Rng& rng) {
  for (Eigen::Index d = 0; d < z.p.size(); ++d)
    z.p(d) = rnorm(rng) / std::sqrt(h.inv_mass(d));
  const double h0 = h.joint(z);

  PhasePoint minus = z;
  PhasePoint plus = z;
  Eigen::VectorXd rho = z.p;
  Eigen::VectorXd prop_q = z.q;
  Eigen::VectorXd prop_grad = z.grad;
  double prop_logp = z.logp;
  double log_sum_weight = 0.0;  // weight of the initial state relative to h0
  double sum_accept = 0.0;
  long n_states = 0;
  bool divergent = false;

  for (int depth = 0; depth < max_depth; ++depth) {
    const double dir = runif(rng) < 0.5 ? -1.0 : 1.0;
    const PhasePoint& edge = dir > 0.0 ? plus : minus;
    Subtree sub = build_tree(h, edge, dir * eps, depth, h0, rng);
    sum_accept += sub.sum_accept;
    n_states += sub.n_states;
    if (sub.divergent) {
      divergent = true;
      break;
    }
    if (sub.turned) break;

    // biased progressive sampling towards the new subtree
    if (std::log(runif(rng)) < sub.log_sum_weight - log_sum_weight) {
      prop_q = sub.prop_q;
      prop_grad = sub.prop_grad;
      prop_logp = sub.prop_logp;
    }
    if (dir > 0.0)
      plus = sub.plus;
    else
      minus = sub.minus;
    rho += sub.rho;
    log_sum_weight = log_sum_exp(Eigen::Vector2d(log_sum_weight, sub.log_sum_weight));

    const Eigen::VectorXd span = plus.q - minus.q;
    if (span.dot(h.p_sharp(minus)) < 0.0 || span.dot(h.p_sharp(plus)) < 0.0) break;
  }

  z.q = std::move(prop_q);
  z.grad = std::move(prop_grad);
  z.logp = prop_logp;
  TransitionResult res;
  res.accept_stat = n_states > 0 ? sum_accept / static_cast<double>(n_states) : 0.0;
  res.divergent = divergent;
  return res;
}

struct DualAveraging {
  double mu = 0.0;
  double log_eps = 0.0;
  double log_eps_bar = 0.0;
  double h_bar = 0.0;
  double m = 1.0;
  double delta;
  static constexpr double t0 = 10.0;
  static constexpr double gamma = 0.05;
  static constexpr double kappa = 0.75;

  explicit DualAveraging(double eps_init, double target)
      : mu(std::log(10.0 * eps_init)), log_eps(std::log(eps_init)), delta(target) {}

  void update(double accept) {
    const double prop = 1.0 / (m + t0);
    h_bar = (1.0 - prop) * h_bar + prop * (delta - accept);
    log_eps = mu - std::sqrt(m) / gamma * h_bar;
    const double w = std::pow(m, -kappa);
    log_eps_bar = w * log_eps + (1.0 - w) * log_eps_bar;
    m += 1.0;
  }
  double eps() const { return std::exp(log_eps); }
  double eps_final() const { return std::exp(log_eps_bar); }
};

double find_reasonable_epsilon(const Hamiltonian& h, const PhasePoint& init, Rng& rng) {
  double eps = 1.0;
  PhasePoint z = init;
  for (Eigen::Index d = 0; d < z.p.size(); ++d)
    z.p(d) = rnorm(rng) / std::sqrt(h.inv_mass(d));
  const double h0 = h.joint(z);

  auto log_ratio_at = [&](double step) {
    PhasePoint trial = z;
    h.leapfrog(trial, step);
    return std::isfinite(trial.logp) ? h.joint(trial) - h0 : kNegInf;
  };

  double ratio = log_ratio_at(eps);
  while (!std::isfinite(ratio) && eps > 1e-10) {
    eps *= 0.5;
    ratio = log_ratio_at(eps);
  }
  const double dir = ratio > std::log(0.5) ? 1.0 : -1.0;
  for (int i = 0; i < 50; ++i) {
    if (dir * ratio <= dir * std::log(0.5)) break;
    eps *= dir > 0.0 ? 2.0 : 0.5;
    ratio = log_ratio_at(eps);
    if (!std::isfinite(ratio)) {
      eps *= 0.5;
      break;
    }
  }
  return eps;
}

struct Welford {
  Eigen::VectorXd mean;
  Eigen::VectorXd m2;
  double n = 0.0;

  explicit Welford(Eigen::Index dim)
      : mean(Eigen::VectorXd::Zero(dim)), m2(Eigen::VectorXd::Zero(dim)) {}
  void add(const Eigen::VectorXd& x) {
    n += 1.0;
    const Eigen::VectorXd delta = x - mean;
    mean += delta / n;
    m2 += delta.cwiseProduct(x - mean);
  }
  Eigen::VectorXd regularized_variance() const {
    Eigen::VectorXd var = n > 1.0 ? (m2 / (n - 1.0)).eval() : Eigen::VectorXd::Ones(mean.size());
    return (var.array() * (n / (n + 5.0)) + 1e-3 * (5.0 / (n + 5.0))).matrix();
  }
};

// Stan-style warmup phases: fast start, doubling slow windows, fast tail.
struct AdaptSchedule {
  int init_buffer = 75;
  int term_buffer = 50;
  int base_window = 25;
  int warmup;

  explicit AdaptSchedule(int w) : warmup(w) {
    if (warmup < init_buffer + term_buffer + base_window) {
      init_buffer = std::max(1, static_cast<int>(0.15 * warmup));
      term_buffer = std::max(1, static_cast<int>(0.10 * warmup));
      base_window = std::max(1, warmup - init_buffer - term_buffer);
    }
  }
  bool adapt_metric() const { return warmup >= 20; }
  // window end iterations (0-based, inclusive)
  std::vector<int> window_ends() const {
    std::vector<int> ends;
    if (!adapt_metric()) return ends;
    const int slow_end = warmup - term_buffer;
    int start = init_buffer;
    int width = base_window;
    while (start < slow_end) {
      int end = start + width;
      if (end + 2 * width > slow_end) end = slow_end;  // absorb the remainder
      ends.push_back(end - 1);
      start = end;
      width *= 2;
    }
    return ends;
  }
  bool in_slow_phase(int iter) const {
    return adapt_metric() && iter >= init_buffer && iter < warmup - term_buffer;
  }
};

void run_chain(const TargetDensity& target, const NutsConfig& cfg, int chain_id,
               Eigen::MatrixXd& draws, double& final_eps, Eigen::VectorXd& metric_out,
               int& divergences, double& mean_accept) {
  Rng rng = make_stream(cfg.seed, 0x40755ULL, static_cast<std::uint64_t>(chain_id));
  const Eigen::Index dim = target.dim;

  Hamiltonian h{&target, Eigen::VectorXd::Ones(dim)};
  PhasePoint z;
  z.q.resize(dim);
  z.p = Eigen::VectorXd::Zero(dim);
  z.grad.resize(dim);

  bool ok = false;
  for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
    for (Eigen::Index d = 0; d < dim; ++d) z.q(d) = rnorm(rng, 0.0, cfg.init_jitter);
    h.refresh(z);
    ok = std::isfinite(z.logp) && z.grad.allFinite();
  }
  if (!ok) throw std::runtime_error("nuts_sample: no finite initial point after 100 jitter attempts");

  double eps = find_reasonable_epsilon(h, z, rng);
  DualAveraging da(eps, cfg.target_accept);
  AdaptSchedule schedule(cfg.warmup);
  const std::vector<int> window_ends = schedule.window_ends();
  std::size_t window_idx = 0;
  Welford acc(dim);

  for (int it = 0; it < cfg.warmup; ++it) {
    const TransitionResult r = nuts_transition(h, z, da.eps(), cfg.max_depth, rng);
    da.update(r.accept_stat);
    if (schedule.in_slow_phase(it)) acc.add(z.q);
    if (window_idx < window_ends.size() && it == window_ends[window_idx]) {
      h.inv_mass = acc.regularized_variance();
      acc = Welford(dim);
      ++window_idx;
      const double fresh = find_reasonable_epsilon(h, z, rng);
      da = DualAveraging(fresh, cfg.target_accept);
    }
  }

  eps = cfg.warmup > 0 ? da.eps_final() : da.eps();
  draws.resize(cfg.iters, dim);
  divergences = 0;
  double accept_sum = 0.0;
  for (int it = 0; it < cfg.iters; ++it) {
    const TransitionResult r = nuts_transition(h, z, eps, cfg.max_depth, rng);
    draws.row(it) = z.q.transpose();
    divergences += r.divergent ? 1 : 0;
    accept_sum += r.accept_stat;
  }
  final_eps = eps;
  metric_out = h.inv_mass;
  mean_accept = cfg.iters > 0 ? accept_sum / cfg.iters : 0.0;
}

}  // namespace

Chains nuts_sample(const TargetDensity& target, const NutsConfig& cfg) {
  if (cfg.chains < 1) throw std::invalid_argument("nuts_sample: need >= 1 chain");
  if (cfg.iters < 1) throw std::invalid_argument("nuts_sample: need >= 1 sampling iteration");
  if (target.dim < 1 || !target.logp_and_grad)
    throw std::invalid_argument("nuts_sample: target is not set up");

  Chains out;
  out.draws.resize(cfg.chains);
  out.step_size.resize(cfg.chains);
  out.mass_diag.resize(cfg.chains, target.dim);
  out.divergences.assign(cfg.chains, 0);
  out.mean_accept.assign(cfg.chains, 0.0);

  std::vector<Eigen::VectorXd> metrics(cfg.chains);
  parallel_for(static_cast<std::size_t>(cfg.chains), cfg.jobs, [&](std::size_t c) {
    run_chain(target, cfg, static_cast<int>(c), out.draws[c], out.step_size(c), metrics[c],
              out.divergences[c], out.mean_accept[c]);
  });
  for (int c = 0; c < cfg.chains; ++c) out.mass_diag.row(c) = metrics[c].transpose();
  out.warning = out.divergence_rate() > 0.25;
  return out;
}

// ---------------------------------------------------------------------------
// on-disk formats
// ---------------------------------------------------------------------------

namespace {
constexpr char kChainsMagic[8] = {'C', 'R', 'I', 'T', 'C', 'H', 'N', '1'};
}

void save_chains(const Chains& chains, const std::string& path) {
  json header;
  header["version"] = 1;
  header["chains"] = chains.num_chains();
  header["iters"] = chains.iters_per_chain();
  header["dim"] = chains.dim();
  header["step_size"] = std::vector<double>(chains.step_size.data(),
                                            chains.step_size.data() + chains.step_size.size());
  json mass = json::array();
  for (int c = 0; c < chains.num_chains(); ++c) {
    json row = json::array();
    for (Eigen::Index d = 0; d < chains.dim(); ++d) row.push_back(chains.mass_diag(c, d));
    mass.push_back(std::move(row));
  }
  header["mass_diag"] = std::move(mass);
  header["divergences"] = chains.divergences;
  header["mean_accept"] = chains.mean_accept;
  header["warning"] = chains.warning;
  const std::string htext = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write chains file: " + path);
  out.write(kChainsMagic, sizeof(kChainsMagic));
  const std::uint64_t hlen = htext.size();
  out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  out.write(htext.data(), static_cast<std::streamsize>(htext.size()));
  // columnar: per chain, per dimension, the iteration series
  for (const Eigen::MatrixXd& m : chains.draws)
    for (Eigen::Index d = 0; d < m.cols(); ++d)
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const double v = m(i, d);
        out.write(reinterpret_cast<const char*>(&v), sizeof(v));
      }
}

Chains load_chains(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open chains file: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (std::memcmp(magic, kChainsMagic, sizeof(magic)) != 0)
    throw std::invalid_argument("not a chains file: " + path);
  std::uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  std::string htext(hlen, '\0');
  in.read(htext.data(), static_cast<std::streamsize>(hlen));
  json header = json::parse(htext);

  Chains out;
  const int C = header.at("chains").get<int>();
  const Eigen::Index iters = header.at("iters").get<Eigen::Index>();
  const Eigen::Index dim = header.at("dim").get<Eigen::Index>();
  const auto step = header.at("step_size").get<std::vector<double>>();
  out.step_size = Eigen::Map<const Eigen::VectorXd>(step.data(), static_cast<Eigen::Index>(step.size()));
  out.mass_diag.resize(C, dim);
  for (int c = 0; c < C; ++c)
    for (Eigen::Index d = 0; d < dim; ++d)
      out.mass_diag(c, d) = header.at("mass_diag").at(c).at(d).get<double>();
  out.divergences = header.at("divergences").get<std::vector<int>>();
  out.mean_accept = header.at("mean_accept").get<std::vector<double>>();
  out.warning = header.at("warning").get<bool>();
  out.draws.resize(C);
  for (int c = 0; c < C; ++c) {
    out.draws[c].resize(iters, dim);
    for (Eigen::Index d = 0; d < dim; ++d)
      for (Eigen::Index i = 0; i < iters; ++i) {
        double v;
        in.read(reinterpret_cast<char*>(&v), sizeof(v));
        out.draws[c](i, d) = v;
      }
  }
  if (!in) throw std::invalid_argument("chains file truncated: " + path);
  return out;
}

void export_chains_csv(const Chains& chains, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write chains CSV: " + path);
  out << "chain,iter";
  for (Eigen::Index d = 0; d < chains.dim(); ++d) out << ",p" << d;
  out << '\n';
  out.precision(17);
  for (int c = 0; c < chains.num_chains(); ++c)
    for (Eigen::Index i = 0; i < chains.iters_per_chain(); ++i) {
      out << c << ',' << i;
      for (Eigen::Index d = 0; d < chains.dim(); ++d) out << ',' << chains.draws[c](i, d);
      out << '\n';
    }
}

}  // namespace critic
