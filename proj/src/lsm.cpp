#include "critic/lsm.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "critic/math.hpp"

namespace critic {

using json = nlohmann::json;

std::string to_string(LsmKind kind) {
  switch (kind) {
    case LsmKind::DigitIdentity: return "digit-identity";
    case LsmKind::SeqLength: return "seq-length";
    case LsmKind::Lda: return "lda";
  }
  return "unknown";
}

LsmKind lsm_kind_from_string(const std::string& name) {
  if (name == "digit-identity") return LsmKind::DigitIdentity;
  if (name == "seq-length") return LsmKind::SeqLength;
  if (name == "lda") return LsmKind::Lda;
  throw std::invalid_argument("unknown LSM kind: " + name);
}

long long sequence_length(const Sample& s) {
  if (s.kind == SampleKind::TokenSequence) return s.payload.size();
  if (s.kind == SampleKind::CountVector && s.dim() == 1)
    return static_cast<long long>(s.payload(0));
  throw std::invalid_argument("sequence_length: sample is neither a token sequence nor a scalar count");
}

// ---------------------------------------------------------------------------
// digit identity: supervised Bernoulli mixture with conjugate Beta posteriors
// ---------------------------------------------------------------------------

LsmPosterior fit_digit_model(const LabeledSamples& data, double alpha_p, double beta_p,
                             int num_draws, std::uint64_t seed) {
  if (alpha_p <= 0.0 || beta_p <= 0.0)
    throw std::invalid_argument("fit_digit_model: prior parameters must be > 0");
  if (num_draws < 1) throw std::invalid_argument("fit_digit_model: num_draws must be >= 1");
  if (data.samples.size() != data.labels.size())
    throw std::invalid_argument("fit_digit_model: labels length must equal sample count");

  const int C = std::max(data.num_classes, 1);
  Eigen::Index D = 0;
  for (const Sample& s : data.samples) {
    if (s.kind != SampleKind::BinaryVector)
      throw std::invalid_argument("fit_digit_model: samples must be binary vectors");
    if (D == 0) D = s.dim();
    if (s.dim() != D) throw std::invalid_argument("fit_digit_model: samples must share dim");
  }
  if (D == 0) D = 1;  // pure-prior posterior over a single pixel when no data arrives

  Eigen::MatrixXd ones = Eigen::MatrixXd::Zero(C, D);
  Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(C, D);
  Eigen::VectorXd class_counts = Eigen::VectorXd::Zero(C);
  for (std::size_t n = 0; n < data.samples.size(); ++n) {
    const int k = data.labels[n];
    if (k < 0 || k >= C) throw std::invalid_argument("fit_digit_model: label out of range");
    class_counts(k) += 1.0;
    ones.row(k) += data.samples[n].payload.transpose();
    zeros.row(k) += (1.0 - data.samples[n].payload.array()).matrix().transpose();
  }

  LsmPosterior post;
  post.kind = LsmKind::DigitIdentity;
  post.digit = {alpha_p, beta_p, C, D};
  post.weight_dirichlet = class_counts.array() + 1.0;  // Dirichlet(1) prior on class weights

  const Eigen::MatrixXd a = ones.array() + alpha_p;
  const Eigen::MatrixXd b = zeros.array() + beta_p;

  Rng rng = make_stream(seed, 0xd161);
  post.draws.reserve(static_cast<std::size_t>(num_draws));
  for (int s = 0; s < num_draws; ++s) {
    LsmDraw d;
    d.weights = rdirichlet(rng, post.weight_dirichlet);
    d.params.resize(C, D);
    for (int k = 0; k < C; ++k)
      for (Eigen::Index j = 0; j < D; ++j) d.params(k, j) = rbeta(rng, a(k, j), b(k, j));
    d.suff_a = a;
    d.suff_b = b;
    post.draws.push_back(std::move(d));
  }
  return post;
}

// ---------------------------------------------------------------------------
// sequence length: Gibbs over a latent mixture of Poissons
// ---------------------------------------------------------------------------

LsmPosterior fit_length_model(const std::vector<long long>& lengths, int K, double a_phi,
                              double b_phi, double alpha_theta, const GibbsConfig& gibbs) {
  if (K < 1) throw std::invalid_argument("fit_length_model: K must be >= 1");
  if (lengths.empty()) throw std::invalid_argument("fit_length_model: empty data");
  if (gibbs.iters <= gibbs.burnin)
    throw std::invalid_argument("fit_length_model: iters must exceed burnin");
  if (a_phi <= 0.0 || b_phi <= 0.0 || alpha_theta <= 0.0)
    throw std::invalid_argument("fit_length_model: prior parameters must be > 0");
  for (long long x : lengths)
    if (x < 0) throw std::invalid_argument("fit_length_model: lengths must be >= 0");

  const std::size_t N = lengths.size();
  Rng rng = make_stream(gibbs.seed, 0x1e46);

  // init rates at data quantiles so components start spread over the support
  std::vector<long long> sorted(lengths);
  std::sort(sorted.begin(), sorted.end());
  Eigen::VectorXd rates(K);
  for (int k = 0; k < K; ++k) {
    const std::size_t q = static_cast<std::size_t>((k + 0.5) / K * static_cast<double>(N - 1));
    rates(k) = static_cast<double>(sorted[q]) + 0.5;
  }
  Eigen::VectorXd theta = Eigen::VectorXd::Constant(K, 1.0 / K);

  LsmPosterior post;
  post.kind = LsmKind::SeqLength;
  post.length = {a_phi, b_phi, alpha_theta, K};

  std::vector<int> z(N, 0);
  Eigen::VectorXd log_resp(K);
  for (int t = 1; t <= gibbs.iters; ++t) {
    Eigen::VectorXd sum_x = Eigen::VectorXd::Zero(K);
    Eigen::VectorXd n_k = Eigen::VectorXd::Zero(K);
    for (std::size_t n = 0; n < N; ++n) {
      for (int k = 0; k < K; ++k)
        log_resp(k) = std::log(theta(k)) + poisson_log_pmf(lengths[n], rates(k));
      z[n] = static_cast<int>(rcategorical_log(rng, log_resp));
      sum_x(z[n]) += static_cast<double>(lengths[n]);
      n_k(z[n]) += 1.0;
    }
    for (int k = 0; k < K; ++k) rates(k) = rgamma(rng, a_phi + sum_x(k), b_phi + n_k(k));
    theta = rdirichlet(rng, (n_k.array() + alpha_theta).matrix());

    if (t > gibbs.burnin && (t - gibbs.burnin - 1) % std::max(gibbs.thin, 1) == 0) {
      LsmDraw d;
      d.weights = theta;
      d.params = rates;
      d.suff_a = (sum_x.array() + a_phi).matrix();
      d.suff_b = (n_k.array() + b_phi).matrix();
      post.draws.push_back(std::move(d));
    }
  }
  return post;
}

// ---------------------------------------------------------------------------
// LDA: collapsed Gibbs over token-topic assignments
// ---------------------------------------------------------------------------

LsmPosterior fit_lda(const std::vector<Sample>& corpus, int K, double alpha, double beta,
                     const GibbsConfig& gibbs) {
  if (K < 2) throw std::invalid_argument("fit_lda: K must be >= 2");
  if (corpus.empty()) throw std::invalid_argument("fit_lda: empty corpus");
  if (gibbs.iters <= gibbs.burnin) throw std::invalid_argument("fit_lda: iters must exceed burnin");
  if (alpha <= 0.0 || beta <= 0.0)
    throw std::invalid_argument("fit_lda: concentrations must be > 0");

  const Eigen::Index V = corpus.front().dim();
  if (V < 2) throw std::invalid_argument("fit_lda: vocabulary must have >= 2 words");

  // expand documents into token instances
  std::vector<int> token_word, token_doc;
  for (std::size_t m = 0; m < corpus.size(); ++m) {
    const Sample& doc = corpus[m];
    if (doc.kind != SampleKind::CountVector)
      throw std::invalid_argument("fit_lda: corpus must hold count vectors");
    if (doc.dim() != V) throw std::invalid_argument("fit_lda: documents must share vocabulary");
    long long tokens = 0;
    for (Eigen::Index w = 0; w < V; ++w) {
      const long long c = static_cast<long long>(doc.payload(w));
      tokens += c;
      for (long long i = 0; i < c; ++i) {
        token_word.push_back(static_cast<int>(w));
        token_doc.push_back(static_cast<int>(m));
      }
    }
    if (tokens < 1) throw std::invalid_argument("fit_lda: every document needs >= 1 token");
  }

  const std::size_t T = token_word.size();
  const std::size_t M = corpus.size();
  Rng rng = make_stream(gibbs.seed, 0x1da0);

  std::vector<int> z(T);
  Eigen::MatrixXd n_mk = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(M), K);
  Eigen::MatrixXd n_kw = Eigen::MatrixXd::Zero(K, V);
  Eigen::VectorXd n_k = Eigen::VectorXd::Zero(K);
  for (std::size_t i = 0; i < T; ++i) {
    z[i] = static_cast<int>(rng() % static_cast<std::uint64_t>(K));
    n_mk(token_doc[i], z[i]) += 1.0;
    n_kw(z[i], token_word[i]) += 1.0;
    n_k(z[i]) += 1.0;
  }

  LsmPosterior post;
  post.kind = LsmKind::Lda;
  post.lda.K = K;
  post.lda.alpha = alpha;
  post.lda.beta = beta;
  post.lda.vocab = static_cast<int>(V);

  const double vbeta = static_cast<double>(V) * beta;
  Eigen::VectorXd probs(K);
  for (int t = 1; t <= gibbs.iters; ++t) {
    for (std::size_t i = 0; i < T; ++i) {
      const int m = token_doc[i];
      const int w = token_word[i];
      const int old = z[i];
      n_mk(m, old) -= 1.0;
      n_kw(old, w) -= 1.0;
      n_k(old) -= 1.0;
      for (int k = 0; k < K; ++k)
        probs(k) = (n_mk(m, k) + alpha) * (n_kw(k, w) + beta) / (n_k(k) + vbeta);
      const int knew = static_cast<int>(rcategorical(rng, probs));
      z[i] = knew;
      n_mk(m, knew) += 1.0;
      n_kw(knew, w) += 1.0;
      n_k(knew) += 1.0;
    }
    if (t > gibbs.burnin && (t - gibbs.burnin - 1) % std::max(gibbs.thin, 1) == 0) {
      LsmDraw d;
      d.suff_a = n_kw;
      d.params.resize(K, V);
      for (int k = 0; k < K; ++k)
        d.params.row(k) = ((n_kw.row(k).array() + beta) / (n_k(k) + vbeta)).matrix();
      d.doc_dirichlet = Eigen::VectorXd::Constant(K, alpha);
      d.weights = Eigen::VectorXd::Constant(K, 1.0 / K);
      post.draws.push_back(std::move(d));
    }
  }
  return post;
}

// ---------------------------------------------------------------------------
// per-draw predictive density
// ---------------------------------------------------------------------------

namespace {

Eigen::VectorXd digit_component_loglik(const LsmDraw& draw, const Sample& x) {
  const Eigen::Index K = draw.params.rows();
  Eigen::VectorXd out(K);
  const auto xa = x.payload.array();
  for (Eigen::Index k = 0; k < K; ++k) {
    const auto p = draw.params.row(k).transpose().array();
    out(k) = (xa * p.log() + (1.0 - xa) * (-p).log1p()).sum();
  }
  return out;
}

Eigen::VectorXd length_component_loglik(const LsmDraw& draw, long long len) {
  const Eigen::Index K = draw.params.rows();
  Eigen::VectorXd out(K);
  for (Eigen::Index k = 0; k < K; ++k) out(k) = poisson_log_pmf(len, draw.params(k, 0));
  return out;
}

double lda_doc_log_density(const LsmPosterior& post, const LsmDraw& draw, const Sample& x,
                           Rng& rng) {
  const int R = std::max(post.lda.inner_theta_samples, 1);
  const Eigen::Index V = draw.params.cols();
  std::vector<Eigen::Index> words;
  for (Eigen::Index w = 0; w < V; ++w)
    if (x.payload(w) > 0.0) words.push_back(w);
  Eigen::VectorXd per_theta(R);
  for (int r = 0; r < R; ++r) {
    const Eigen::VectorXd theta = rdirichlet(rng, draw.doc_dirichlet);
    double lp = 0.0;
    for (Eigen::Index w : words) {
      const double mix = theta.dot(draw.params.col(w));
      lp += x.payload(w) * (mix > 0.0 ? std::log(mix) : kNegInf);
    }
    per_theta(r) = lp;
  }
  return log_mean_exp(per_theta);
}

void check_kind(const LsmPosterior& post, const Sample& x) {
  switch (post.kind) {
    case LsmKind::DigitIdentity:
      if (x.kind != SampleKind::BinaryVector || x.dim() != post.digit.dim)
        throw std::invalid_argument("digit model expects binary vectors of dim " +
                                    std::to_string(post.digit.dim));
      break;
    case LsmKind::SeqLength:
      sequence_length(x);  // throws on kind mismatch
      break;
    case LsmKind::Lda:
      if (x.kind != SampleKind::CountVector || x.dim() != post.lda.vocab)
        throw std::invalid_argument("lda model expects count vectors over the fitted vocabulary");
      break;
  }
}

}  // namespace

double log_pred_density_draw(const LsmPosterior& post, const LsmDraw& draw, const Sample& x,
                             Rng& rng) {
  check_kind(post, x);
  switch (post.kind) {
    case LsmKind::DigitIdentity: {
      Eigen::VectorXd lp = digit_component_loglik(draw, x);
      lp.array() += draw.weights.array().log();
      return log_sum_exp(lp);
    }
    case LsmKind::SeqLength: {
      Eigen::VectorXd lp = length_component_loglik(draw, sequence_length(x));
      lp.array() += draw.weights.array().log();
      return log_sum_exp(lp);
    }
    case LsmKind::Lda:
      return lda_doc_log_density(post, draw, x, rng);
  }
  return kNegInf;
}

double log_pred_density(const LsmPosterior& post, Eigen::Index draw_index, const Sample& x,
                        Rng& rng) {
  if (draw_index < 0 || draw_index >= post.num_draws())
    throw std::invalid_argument("log_pred_density: draw index out of range");
  return log_pred_density_draw(post, post.draws[static_cast<std::size_t>(draw_index)], x, rng);
}

// ---------------------------------------------------------------------------
// seed-conditioned update (Eq. 2 machinery)
// ---------------------------------------------------------------------------

LsmDraw seed_update(const LsmPosterior& post, Eigen::Index draw_index, const Sample& x_seed,
                    Rng& rng, bool lda_update_topic_words) {
  if (draw_index < 0 || draw_index >= post.num_draws())
    throw std::invalid_argument("seed_update: draw index out of range");
  check_kind(post, x_seed);
  LsmDraw draw = post.draws[static_cast<std::size_t>(draw_index)];

  switch (post.kind) {
    case LsmKind::DigitIdentity: {
      Eigen::VectorXd log_resp = digit_component_loglik(draw, x_seed);
      log_resp.array() += draw.weights.array().log();
      const Eigen::Index c = rcategorical_log(rng, log_resp);
      for (Eigen::Index d = 0; d < draw.params.cols(); ++d) {
        draw.suff_a(c, d) += x_seed.payload(d);
        draw.suff_b(c, d) += 1.0 - x_seed.payload(d);
        draw.params(c, d) = rbeta(rng, draw.suff_a(c, d), draw.suff_b(c, d));
      }
      return draw;
    }
    case LsmKind::SeqLength: {
      const long long len = sequence_length(x_seed);
      Eigen::VectorXd log_resp = length_component_loglik(draw, len);
      log_resp.array() += draw.weights.array().log();
      const Eigen::Index c = rcategorical_log(rng, log_resp);
      draw.suff_a(c, 0) += static_cast<double>(len);
      draw.suff_b(c, 0) += 1.0;
      draw.params(c, 0) = rgamma(rng, draw.suff_a(c, 0), draw.suff_b(c, 0));
      return draw;
    }
    case LsmKind::Lda: {
      const int K = post.lda.K;
      const double alpha = post.lda.alpha;
      std::vector<int> words;
      for (Eigen::Index w = 0; w < x_seed.dim(); ++w) {
        const long long c = static_cast<long long>(x_seed.payload(w));
        for (long long i = 0; i < c; ++i) words.push_back(static_cast<int>(w));
      }
      Eigen::VectorXd topic_counts = Eigen::VectorXd::Zero(K);
      std::vector<int> z(words.size());
      Eigen::VectorXd probs(K);
      for (std::size_t i = 0; i < words.size(); ++i) {
        probs = draw.params.col(words[i]);
        z[i] = static_cast<int>(rcategorical(rng, probs));
        topic_counts(z[i]) += 1.0;
      }
      for (int sweep = 0; sweep < post.lda.seed_gibbs_sweeps; ++sweep) {
        for (std::size_t i = 0; i < words.size(); ++i) {
          topic_counts(z[i]) -= 1.0;
          for (int k = 0; k < K; ++k)
            probs(k) = draw.params(k, words[i]) * (topic_counts(k) + alpha);
          z[i] = static_cast<int>(rcategorical(rng, probs));
          topic_counts(z[i]) += 1.0;
        }
      }
      draw.doc_dirichlet = topic_counts.array() + alpha;
      draw.weights = draw.doc_dirichlet / draw.doc_dirichlet.sum();
      if (lda_update_topic_words) {
        const double vbeta = static_cast<double>(post.lda.vocab) * post.lda.beta;
        for (std::size_t i = 0; i < words.size(); ++i) draw.suff_a(z[i], words[i]) += 1.0;
        const Eigen::VectorXd row_tot = draw.suff_a.rowwise().sum();
        for (int k = 0; k < K; ++k)
          draw.params.row(k) =
              ((draw.suff_a.row(k).array() + post.lda.beta) / (row_tot(k) + vbeta)).matrix();
      }
      return draw;
    }
  }
  throw std::logic_error("seed_update: unreachable");
}

// ---------------------------------------------------------------------------
// posterior predictive sampling
// ---------------------------------------------------------------------------

std::vector<Sample> posterior_predictive_sample(const LsmPosterior& post, int n, Rng& rng,
                                                const PredictiveConfig& cfg) {
  if (n < 1) throw std::invalid_argument("posterior_predictive_sample: n must be >= 1");
  if (post.draws.empty()) throw std::invalid_argument("posterior_predictive_sample: empty posterior");

  std::vector<Sample> out;
  out.reserve(static_cast<std::size_t>(n));
  std::uniform_int_distribution<std::size_t> pick(0, post.draws.size() - 1);
  for (int i = 0; i < n; ++i) {
    const LsmDraw& draw = post.draws[pick(rng)];
    Sample s;
    switch (post.kind) {
      case LsmKind::DigitIdentity: {
        const Eigen::Index c = rcategorical(rng, draw.weights);
        s.kind = SampleKind::BinaryVector;
        s.payload.resize(draw.params.cols());
        for (Eigen::Index d = 0; d < s.payload.size(); ++d)
          s.payload(d) = runif(rng) < draw.params(c, d) ? 1.0 : 0.0;
        break;
      }
      case LsmKind::SeqLength: {
        const Eigen::Index c = rcategorical(rng, draw.weights);
        const long long len = rpoisson(rng, draw.params(c, 0));
        s.kind = SampleKind::TokenSequence;
        s.payload = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(len));
        break;
      }
      case LsmKind::Lda: {
        const Eigen::VectorXd theta = rdirichlet(rng, draw.doc_dirichlet);
        s.kind = SampleKind::CountVector;
        s.payload = Eigen::VectorXd::Zero(post.lda.vocab);
        for (int t = 0; t < cfg.lda_doc_length; ++t) {
          const Eigen::Index k = rcategorical(rng, theta);
          const Eigen::Index w = rcategorical(rng, draw.params.row(k).transpose());
          s.payload(w) += 1.0;
        }
        break;
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// serialisation
// ---------------------------------------------------------------------------

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
  const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
  if (r == 0) return Eigen::MatrixXd();
  const Eigen::Index c = static_cast<Eigen::Index>(rows.at(0).size());
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rows.at(i).at(j).get<double>();
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const json& arr) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = arr.at(i).get<double>();
  return v;
}

}  // namespace

std::string lsm_to_json(const LsmPosterior& post) {
  json j;
  j["version"] = 1;
  j["kind"] = to_string(post.kind);
  j["digit"] = {{"alpha_p", post.digit.alpha_p},
                {"beta_p", post.digit.beta_p},
                {"num_classes", post.digit.num_classes},
                {"dim", post.digit.dim}};
  j["length"] = {{"a_phi", post.length.a_phi},
                 {"b_phi", post.length.b_phi},
                 {"alpha_theta", post.length.alpha_theta},
                 {"K", post.length.K}};
  j["lda"] = {{"K", post.lda.K},
              {"alpha", post.lda.alpha},
              {"beta", post.lda.beta},
              {"vocab", post.lda.vocab},
              {"inner_theta_samples", post.lda.inner_theta_samples},
              {"seed_gibbs_sweeps", post.lda.seed_gibbs_sweeps}};
  j["weight_dirichlet"] = vector_to_json(post.weight_dirichlet);
  json draws = json::array();
  for (const LsmDraw& d : post.draws) {
    json dj;
    dj["weights"] = vector_to_json(d.weights);
    dj["params"] = matrix_to_json(d.params);
    dj["suff_a"] = matrix_to_json(d.suff_a);
    dj["suff_b"] = matrix_to_json(d.suff_b);
    dj["doc_dirichlet"] = vector_to_json(d.doc_dirichlet);
    draws.push_back(std::move(dj));
  }
  j["draws"] = std::move(draws);
  return j.dump();
}

LsmPosterior lsm_from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.at("version").get<int>() != 1)
    throw std::invalid_argument("lsm_from_json: unsupported version");
  LsmPosterior post;
  post.kind = lsm_kind_from_string(j.at("kind").get<std::string>());
  const json& dg = j.at("digit");
  post.digit = {dg.at("alpha_p").get<double>(), dg.at("beta_p").get<double>(),
                dg.at("num_classes").get<int>(), dg.at("dim").get<Eigen::Index>()};
  const json& ln = j.at("length");
  post.length = {ln.at("a_phi").get<double>(), ln.at("b_phi").get<double>(),
                 ln.at("alpha_theta").get<double>(), ln.at("K").get<int>()};
  const json& ld = j.at("lda");
  post.lda = {ld.at("K").get<int>(),    ld.at("alpha").get<double>(),
              ld.at("beta").get<double>(), ld.at("vocab").get<int>(),
              ld.at("inner_theta_samples").get<int>(), ld.at("seed_gibbs_sweeps").get<int>()};
  post.weight_dirichlet = vector_from_json(j.at("weight_dirichlet"));
  for (const json& dj : j.at("draws")) {
    LsmDraw d;
    d.weights = vector_from_json(dj.at("weights"));
    d.params = matrix_from_json(dj.at("params"));
    d.suff_a = matrix_from_json(dj.at("suff_a"));
    d.suff_b = matrix_from_json(dj.at("suff_b"));
    d.doc_dirichlet = vector_from_json(dj.at("doc_dirichlet"));
    post.draws.push_back(std::move(d));
  }
  return post;
}

void save_lsm(const LsmPosterior& post, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write posterior file: " + path);
  out << lsm_to_json(post);
}

LsmPosterior load_lsm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open posterior file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return lsm_from_json(buf.str());
}

}  // namespace critic
