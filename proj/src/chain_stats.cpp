#include "critic/chain_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "critic/math.hpp"

namespace critic {

namespace {

// Split every sequence in half; drops the middle draw of odd-length chains.
std::vector<Eigen::VectorXd> split_sequences(const std::vector<Eigen::VectorXd>& seqs) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& s : seqs) {
    const Eigen::Index half = s.size() / 2;
    if (half < 1) continue;
    out.push_back(s.head(half));
    out.push_back(s.tail(half));
  }
  return out;
}

// Average-rank normal scores across all sequences jointly.
std::vector<Eigen::VectorXd> rank_normalize(const std::vector<Eigen::VectorXd>& seqs) {
  std::size_t total = 0;
  for (const auto& s : seqs) total += static_cast<std::size_t>(s.size());
  struct Entry {
    double value;
    std::size_t seq;
    Eigen::Index pos;
  };
  std::vector<Entry> entries;
  entries.reserve(total);
  for (std::size_t c = 0; c < seqs.size(); ++c)
    for (Eigen::Index i = 0; i < seqs[c].size(); ++i) entries.push_back({seqs[c](i), c, i});
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.value < b.value; });

  std::vector<Eigen::VectorXd> out(seqs.size());
  for (std::size_t c = 0; c < seqs.size(); ++c) out[c].resize(seqs[c].size());
  const double S = static_cast<double>(total);
  std::size_t i = 0;
  while (i < entries.size()) {
    std::size_t j = i;
    while (j + 1 < entries.size() && entries[j + 1].value == entries[i].value) ++j;
    const double avg_rank = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    const double z = inv_std_normal_cdf((avg_rank - 0.375) / (S + 0.25));
    for (std::size_t k = i; k <= j; ++k) out[entries[k].seq](entries[k].pos) = z;
    i = j + 1;
  }
  return out;
}

bool is_constant(const std::vector<Eigen::VectorXd>& seqs) {
  double first = seqs.front()(0);
  for (const auto& s : seqs)
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) != first) return false;
  return true;
}

struct PooledVariance {
  double w = 0.0;     // mean within-sequence variance
  double var_plus = 0.0;
  double b_over_n = 0.0;
};

PooledVariance pooled_variance(const std::vector<Eigen::VectorXd>& z) {
  const double m = static_cast<double>(z.size());
  const double n = static_cast<double>(z.front().size());
  Eigen::VectorXd means(z.size());
  Eigen::VectorXd vars(z.size());
  for (std::size_t c = 0; c < z.size(); ++c) {
    means(c) = z[c].mean();
    vars(c) = n > 1.0 ? (z[c].array() - means(c)).square().sum() / (n - 1.0) : 0.0;
  }
  PooledVariance out;
  out.w = vars.mean();
  const double grand = means.mean();
  const double b_n = m > 1.0 ? (means.array() - grand).square().sum() / (m - 1.0) : 0.0;
  out.b_over_n = b_n;
  out.var_plus = (n - 1.0) / n * out.w + b_n;
  return out;
}

}  // namespace

double split_rhat(const std::vector<Eigen::VectorXd>& sequences) {
  const auto halves = split_sequences(sequences);
  if (halves.size() < 2) throw std::invalid_argument("split_rhat: need at least one full chain");
  if (is_constant(halves)) return 1.0;
  const auto z = rank_normalize(halves);
  const PooledVariance pv = pooled_variance(z);
  if (pv.w <= 0.0) return 1.0;
  return std::sqrt(pv.var_plus / pv.w);
}

double bulk_ess(const std::vector<Eigen::VectorXd>& sequences) {
  const auto halves = split_sequences(sequences);
  if (halves.empty()) throw std::invalid_argument("bulk_ess: empty sequences");
  if (is_constant(halves)) return 0.0;
  const auto z = rank_normalize(halves);

  const double m = static_cast<double>(z.size());
  const Eigen::Index n = z.front().size();
  const PooledVariance pv = pooled_variance(z);
  if (pv.var_plus <= 0.0) return 0.0;

  std::vector<Eigen::VectorXd> centered(z.size());
  for (std::size_t c = 0; c < z.size(); ++c) centered[c] = z[c].array() - z[c].mean();

  auto mean_autocov = [&](Eigen::Index lag) {
    double acc = 0.0;
    for (const auto& s : centered) {
      double dot = 0.0;
      for (Eigen::Index i = 0; i + lag < n; ++i) dot += s(i) * s(i + lag);
      acc += dot / static_cast<double>(n);
    }
    return acc / m;
  };

  // Geyer initial monotone sequence on paired autocorrelations
  double tau = 1.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  double rho_prev = 1.0 - (pv.w - mean_autocov(1)) / pv.var_plus;  // lag-1
  // pair (rho_1, rho_2), (rho_3, rho_4), ...
  for (Eigen::Index lag = 1; lag + 1 < n; lag += 2) {
    const double rho_a = lag == 1 ? rho_prev : 1.0 - (pv.w - mean_autocov(lag)) / pv.var_plus;
    const double rho_b = 1.0 - (pv.w - mean_autocov(lag + 1)) / pv.var_plus;
    double pair = rho_a + rho_b;
    if (pair < 0.0) break;
    pair = std::min(pair, prev_pair);  // enforce monotone decrease
    tau += 2.0 * pair;
    prev_pair = pair;
  }
  const double total = m * static_cast<double>(n);
  const double ess = total / tau;
  return std::min(ess, total * std::log10(std::max(total, 10.0)));
}

ChainDiagnostics diagnostics(const Chains& chains) {
  if (chains.num_chains() < 1) throw std::invalid_argument("diagnostics: no chains");
  ChainDiagnostics out;
  out.divergences = chains.total_divergences();
  out.rhat_available = chains.num_chains() >= 2;
  const Eigen::Index dim = chains.dim();
  if (out.rhat_available) out.rhat.resize(dim);
  out.ess.resize(dim);

  for (Eigen::Index d = 0; d < dim; ++d) {
    std::vector<Eigen::VectorXd> seqs;
    seqs.reserve(static_cast<std::size_t>(chains.num_chains()));
    bool constant = true;
    for (const auto& m : chains.draws) {
      seqs.push_back(m.col(d));
      if (constant)
        constant = (seqs.back().array() == seqs.back()(0)).all() &&
                   seqs.back()(0) == chains.draws.front()(0, d);
    }
    if (constant) {
      out.degenerate_dims.push_back(static_cast<int>(d));
      out.ess(d) = 0.0;
      if (out.rhat_available) out.rhat(d) = 1.0;
      continue;
    }
    out.ess(d) = bulk_ess(seqs);
    if (out.rhat_available) out.rhat(d) = split_rhat(seqs);
  }
  return out;
}

}  // namespace critic
