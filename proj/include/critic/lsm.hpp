// Latent structure models: supervised Bernoulli-mixture (digit identity),
// Poisson mixture over sequence lengths, and LDA over count vectors.
// Each posterior is a bag of draws; a draw carries enough sufficient
// statistics to support seed-conditioned updates.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "critic/data.hpp"
#include "critic/rng.hpp"

namespace critic {

enum class LsmKind { DigitIdentity, SeqLength, Lda };

std::string to_string(LsmKind kind);
LsmKind lsm_kind_from_string(const std::string& name);

struct GibbsConfig {
  int iters = 2000;
  int burnin = 1000;
  int thin = 2;
  std::uint64_t seed = 0;
};

struct DigitHyper {
  double alpha_p = 1.0;
  double beta_p = 1.0;
  int num_classes = 0;
  Eigen::Index dim = 0;
};

struct LengthHyper {
  double a_phi = 1.0;
  double b_phi = 0.1;
  double alpha_theta = 1.0;
  int K = 5;
};

struct LdaHyper {
  int K = 10;
  double alpha = 0.01;  // document-topic concentration
  double beta = 0.1;    // topic-word concentration
  int vocab = 0;
  int inner_theta_samples = 64;  // Monte-Carlo marginalisation of theta_*
  int seed_gibbs_sweeps = 10;    // token-assignment sweeps in seed_update
};

struct LsmDraw {
  // digit: weights = class probs, params = KxD Bernoulli probs,
  //        suff_a/suff_b = KxD posterior Beta parameters.
  // length: weights = theta, params = Kx1 rates,
  //        suff_a/suff_b = Kx1 posterior Gamma shape/rate.
  // lda:   params = KxV topic-word probs, suff_a = KxV topic-word counts,
  //        doc_dirichlet = Dirichlet over topics for a fresh document.
  Eigen::VectorXd weights;
  Eigen::MatrixXd params;
  Eigen::MatrixXd suff_a;
  Eigen::MatrixXd suff_b;
  Eigen::VectorXd doc_dirichlet;
};

struct LsmPosterior {
  LsmKind kind = LsmKind::DigitIdentity;
  std::vector<LsmDraw> draws;
  DigitHyper digit;
  LengthHyper length;
  LdaHyper lda;
  Eigen::VectorXd weight_dirichlet;  // digit: posterior Dirichlet over classes

  Eigen::Index num_draws() const { return static_cast<Eigen::Index>(draws.size()); }
};

// Outcome value for the sequence-length model: a token-sequence's length, or
// the value of a 1-dim count-vector.
long long sequence_length(const Sample& s);

LsmPosterior fit_digit_model(const LabeledSamples& data, double alpha_p, double beta_p,
                             int num_draws, std::uint64_t seed);

LsmPosterior fit_length_model(const std::vector<long long>& lengths, int K, double a_phi,
                              double b_phi, double alpha_theta, const GibbsConfig& gibbs);

LsmPosterior fit_lda(const std::vector<Sample>& corpus, int K, double alpha, double beta,
                     const GibbsConfig& gibbs);

// log of the draw's mixture density at x (log-sum-exp over components); the
// LDA document density marginalises theta by Monte Carlo, hence the rng.
double log_pred_density(const LsmPosterior& post, Eigen::Index draw_index, const Sample& x,
                        Rng& rng);
double log_pred_density_draw(const LsmPosterior& post, const LsmDraw& draw, const Sample& x,
                             Rng& rng);

// Resample the draw conditioned on one extra observation: the seed's component
// is drawn from its responsibilities and the touched parameters are refreshed
// from the augmented conjugate posterior. For LDA only the seed document's
// topic mixture is carried over unless update_topic_words is set.
LsmDraw seed_update(const LsmPosterior& post, Eigen::Index draw_index, const Sample& x_seed,
                    Rng& rng, bool lda_update_topic_words = false);

struct PredictiveConfig {
  int lda_doc_length = 40;
};

std::vector<Sample> posterior_predictive_sample(const LsmPosterior& post, int n, Rng& rng,
                                                const PredictiveConfig& cfg = {});

// Versioned JSON round-trip (draws, hyperparameters, sufficient statistics).
std::string lsm_to_json(const LsmPosterior& post);
LsmPosterior lsm_from_json(const std::string& text);
void save_lsm(const LsmPosterior& post, const std::string& path);
LsmPosterior load_lsm(const std::string& path);

}  // namespace critic
