#include <doctest.h>

#include <cmath>

#include "critic/lsm.hpp"
#include "critic/statistics.hpp"
#include "support/oracles.hpp"

using namespace critic;

namespace {

Sample binary(std::initializer_list<double> bits) {
  Sample s;
  s.kind = SampleKind::BinaryVector;
  s.payload.resize(static_cast<Eigen::Index>(bits.size()));
  Eigen::Index i = 0;
  for (double b : bits) s.payload(i++) = b;
  return s;
}

LabeledSamples tiny_labeled() {
  LabeledSamples data;
  data.samples = {binary({1, 0, 1}), binary({1, 1, 1}), binary({0, 0, 0}), binary({0, 1, 0})};
  data.labels = {0, 0, 1, 1};
  data.num_classes = 2;
  return data;
}

}  // namespace

TEST_CASE("no data gives the pure prior with predictive 0.5") {
  LabeledSamples empty;
  empty.num_classes = 2;
  const LsmPosterior post = fit_digit_model(empty, 1.0, 1.0, 200, 3);
  for (const auto& d : post.draws) {
    CHECK(d.suff_a.minCoeff() == 1.0);
    CHECK(d.suff_b.maxCoeff() == 1.0);
  }
  const double exact = oracle::digit_exact_marginal(post.weight_dirichlet, post.draws[0].suff_a,
                                                    post.draws[0].suff_b,
                                                    Eigen::VectorXd::Ones(1));
  CHECK(exact == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("conjugate count update: two ones give Beta(3,1) with mean 0.75") {
  LabeledSamples data;
  data.samples = {binary({1}), binary({1})};
  data.labels = {0, 0};
  data.num_classes = 1;
  const LsmPosterior post = fit_digit_model(data, 1.0, 1.0, 10, 1);
  CHECK(post.draws[0].suff_a(0, 0) == 3.0);
  CHECK(post.draws[0].suff_b(0, 0) == 1.0);
  CHECK(post.draws[0].suff_a(0, 0) / (post.draws[0].suff_a(0, 0) + post.draws[0].suff_b(0, 0)) ==
        doctest::Approx(0.75));
}

TEST_CASE("empty class keeps its prior") {
  LabeledSamples data;
  data.samples = {binary({1, 1})};
  data.labels = {0};
  data.num_classes = 3;
  const LsmPosterior post = fit_digit_model(data, 2.0, 5.0, 5, 9);
  CHECK(post.draws[0].suff_a(1, 0) == 2.0);
  CHECK(post.draws[0].suff_b(2, 1) == 5.0);
}

TEST_CASE("uniform Bernoulli single class gives exactly D log 0.5") {
  LsmPosterior post;
  post.kind = LsmKind::DigitIdentity;
  post.digit = {1.0, 1.0, 1, 4};
  LsmDraw d;
  d.weights = Eigen::VectorXd::Ones(1);
  d.params = Eigen::MatrixXd::Constant(1, 4, 0.5);
  d.suff_a = Eigen::MatrixXd::Ones(1, 4);
  d.suff_b = Eigen::MatrixXd::Ones(1, 4);
  post.draws.push_back(d);
  Rng rng = make_stream(0, 0);
  const double lp = log_pred_density(post, 0, binary({1, 0, 1, 1}), rng);
  CHECK(lp == doctest::Approx(4.0 * std::log(0.5)).epsilon(1e-15));
}

TEST_CASE("two-component density matches direct enumeration to 1e-12") {
  LsmPosterior post;
  post.kind = LsmKind::DigitIdentity;
  post.digit = {1.0, 1.0, 2, 2};
  LsmDraw d;
  d.weights = Eigen::Vector2d(0.3, 0.7);
  d.params.resize(2, 2);
  d.params << 0.9, 0.2, 0.4, 0.65;
  d.suff_a = Eigen::MatrixXd::Ones(2, 2);
  d.suff_b = Eigen::MatrixXd::Ones(2, 2);
  post.draws.push_back(d);
  Rng rng = make_stream(0, 0);
  const Sample x = binary({1, 0});
  const double expected = std::log(oracle::digit_mixture_density(d.weights, d.params, x.payload));
  CHECK(log_pred_density(post, 0, x, rng) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("log_pred_density invariant under component relabelling") {
  const LsmPosterior post = fit_digit_model(tiny_labeled(), 1.0, 1.0, 8, 77);
  LsmPosterior permuted = post;
  for (auto& d : permuted.draws) {
    // swap the two components everywhere
    d.weights.reverseInPlace();
    d.params = d.params.colwise().reverse().eval();
    d.suff_a = d.suff_a.colwise().reverse().eval();
    d.suff_b = d.suff_b.colwise().reverse().eval();
  }
  Rng r1 = make_stream(0, 0), r2 = make_stream(0, 0);
  const Sample x = binary({1, 1, 0});
  for (Eigen::Index s = 0; s < post.num_draws(); ++s)
    CHECK(log_pred_density(post, s, x, r1) ==
          doctest::Approx(log_pred_density(permuted, s, x, r2)).epsilon(1e-13));
}

TEST_CASE("dimension mismatch raises") {
  const LsmPosterior post = fit_digit_model(tiny_labeled(), 1.0, 1.0, 4, 5);
  Rng rng = make_stream(0, 0);
  CHECK_THROWS_AS(log_pred_density(post, 0, binary({1, 0}), rng), std::invalid_argument);
}

TEST_CASE("MC lppd matches the closed-form conjugate predictive (3 MC SE)") {
  const LabeledSamples data = tiny_labeled();
  const LsmPosterior post = fit_digit_model(data, 1.0, 1.0, 1000, 123);
  const double exact = oracle::digit_exact_marginal(post.weight_dirichlet, post.draws[0].suff_a,
                                                    post.draws[0].suff_b, binary({1, 0, 1}).payload);
  Rng rng = make_stream(9, 1);
  std::vector<double> per_draw;
  for (Eigen::Index s = 0; s < post.num_draws(); ++s)
    per_draw.push_back(std::exp(log_pred_density(post, s, binary({1, 0, 1}), rng)));
  const auto est = oracle::mc_estimate(per_draw);
  CHECK(std::abs(est.mean - exact) < 3.0 * est.se);
  // and the lppd operation agrees with the same per-draw average
  Rng rng2 = make_stream(9, 1);
  CHECK(std::exp(lppd(post, binary({1, 0, 1}), rng2)) == doctest::Approx(est.mean).epsilon(1e-12));
}

TEST_CASE("conjugacy oracle holds on randomized small instances") {
  Rng gen = make_stream(2024, 0);
  for (int trial = 0; trial < 4; ++trial) {
    const Eigen::Index D = 2 + static_cast<Eigen::Index>(gen() % 3);  // <= 4
    const int N = 4 + static_cast<int>(gen() % 5);                    // <= 8
    LabeledSamples data;
    data.num_classes = 2;
    for (int n = 0; n < N; ++n) {
      Sample s;
      s.kind = SampleKind::BinaryVector;
      s.payload.resize(D);
      for (Eigen::Index d = 0; d < D; ++d) s.payload(d) = gen() % 2 ? 1.0 : 0.0;
      data.samples.push_back(std::move(s));
      data.labels.push_back(static_cast<int>(gen() % 2));
    }
    const LsmPosterior post = fit_digit_model(data, 1.0, 1.0, 2000, 55 + trial);
    Sample x;
    x.kind = SampleKind::BinaryVector;
    x.payload.resize(D);
    for (Eigen::Index d = 0; d < D; ++d) x.payload(d) = gen() % 2 ? 1.0 : 0.0;
    const double exact = oracle::digit_exact_marginal(post.weight_dirichlet, post.draws[0].suff_a,
                                                      post.draws[0].suff_b, x.payload);
    Rng rng = make_stream(77, trial);
    std::vector<double> per_draw;
    for (Eigen::Index s = 0; s < post.num_draws(); ++s)
      per_draw.push_back(std::exp(log_pred_density(post, s, x, rng)));
    const auto est = oracle::mc_estimate(per_draw);
    CHECK(std::abs(est.mean - exact) < 3.0 * est.se);
  }
}

TEST_CASE("seed_update on one class is deterministic in the component") {
  LabeledSamples data;
  data.samples = {binary({1, 0}), binary({1, 1})};
  data.labels = {0, 0};
  data.num_classes = 1;
  const LsmPosterior post = fit_digit_model(data, 1.0, 1.0, 3, 2);
  Rng rng = make_stream(1, 1);
  const LsmDraw updated = seed_update(post, 0, binary({1, 0}), rng);
  CHECK(updated.suff_a(0, 0) == post.draws[0].suff_a(0, 0) + 1.0);
  CHECK(updated.suff_b(0, 0) == post.draws[0].suff_b(0, 0));
  CHECK(updated.suff_a(0, 1) == post.draws[0].suff_a(0, 1));
  CHECK(updated.suff_b(0, 1) == post.draws[0].suff_b(0, 1) + 1.0);
}

TEST_CASE("seeding twice accumulates exactly two observations of counts") {
  LabeledSamples data;
  data.samples = {binary({1, 0}), binary({0, 0})};
  data.labels = {0, 0};
  data.num_classes = 1;
  LsmPosterior post = fit_digit_model(data, 1.0, 1.0, 1, 4);
  Rng rng = make_stream(3, 3);
  const Sample x1 = binary({1, 1});
  const Sample x2 = binary({0, 1});
  LsmPosterior once = post;
  once.draws[0] = seed_update(post, 0, x1, rng);
  const LsmDraw twice = seed_update(once, 0, x2, rng);
  CHECK(twice.suff_a(0, 0) == post.draws[0].suff_a(0, 0) + 1.0);
  CHECK(twice.suff_a(0, 1) == post.draws[0].suff_a(0, 1) + 2.0);
  CHECK(twice.suff_b(0, 0) == post.draws[0].suff_b(0, 0) + 1.0);
  CHECK(twice.suff_b(0, 1) == post.draws[0].suff_b(0, 1));
}

TEST_CASE("conditional statistic matches the enumeration oracle (3 MC SE)") {
  // tiny 2-class model, D=2, N=4
  LabeledSamples data;
  data.samples = {binary({1, 1}), binary({1, 0}), binary({0, 0}), binary({0, 1})};
  data.labels = {0, 0, 1, 1};
  data.num_classes = 2;
  const LsmPosterior post = fit_digit_model(data, 1.0, 1.0, 2000, 321);
  const Sample x_seed = binary({1, 1});
  const Sample x_rep = binary({1, 0});

  // implementation path: sampled component + resampled parameters per draw
  Rng rng_impl = make_stream(5, 0);
  std::vector<double> impl_vals;
  for (Eigen::Index s = 0; s < post.num_draws(); ++s) {
    const LsmDraw u = seed_update(post, s, x_seed, rng_impl);
    impl_vals.push_back(std::exp(log_pred_density_draw(post, u, x_rep, rng_impl)));
  }
  // oracle path: exact enumeration over the seed's component with the
  // closed-form augmented predictive, averaged over the same posterior draws
  std::vector<double> oracle_vals;
  for (const auto& d : post.draws)
    oracle_vals.push_back(
        oracle::digit_exact_conditional_given_draw(d, x_seed.payload, x_rep.payload));

  const auto impl = oracle::mc_estimate(impl_vals);
  const auto orac = oracle::mc_estimate(oracle_vals);
  const double se = std::sqrt(impl.se * impl.se + orac.se * orac.se);
  CHECK(std::abs(impl.mean - orac.mean) < 3.0 * se);
  // the conditional_lppd operation reproduces the implementation-path average
  Rng rng2 = make_stream(5, 0);
  CHECK(std::exp(conditional_lppd(post, x_seed, x_rep, rng2)) ==
        doctest::Approx(impl.mean).epsilon(1e-12));
}

TEST_CASE("conditioning on an agreeing seed sharpens the predictive") {
  // 1-class model with 50 observations; exact closed forms compare directly
  LabeledSamples data;
  data.num_classes = 1;
  Rng gen = make_stream(8, 8);
  for (int n = 0; n < 50; ++n) {
    Sample s;
    s.kind = SampleKind::BinaryVector;
    s.payload.resize(3);
    for (Eigen::Index d = 0; d < 3; ++d) s.payload(d) = runif(gen) < 0.7 ? 1.0 : 0.0;
    data.samples.push_back(std::move(s));
    data.labels.push_back(0);
  }
  const LsmPosterior post = fit_digit_model(data, 1.0, 1.0, 1500, 99);
  const Sample x = binary({1, 1, 0});

  const Eigen::MatrixXd& a = post.draws[0].suff_a;
  const Eigen::MatrixXd& b = post.draws[0].suff_b;
  double exact_marginal = 1.0, exact_conditional = 1.0;
  for (Eigen::Index d = 0; d < 3; ++d) {
    const double p_m = a(0, d) / (a(0, d) + b(0, d));
    const double p_c = (a(0, d) + x.payload(d)) / (a(0, d) + b(0, d) + 1.0);
    exact_marginal *= x.payload(d) > 0.5 ? p_m : 1.0 - p_m;
    exact_conditional *= x.payload(d) > 0.5 ? p_c : 1.0 - p_c;
  }
  CHECK(exact_conditional >= exact_marginal);

  Rng r1 = make_stream(10, 0), r2 = make_stream(10, 1);
  const double cond = conditional_lppd(post, x, x, r1);
  const double marg = lppd(post, x, r2);
  // expectation-level comparison at MC resolution
  CHECK(cond > marg - 0.05);
}

TEST_CASE("posterior predictive with extreme counts emits all ones") {
  LsmPosterior post;
  post.kind = LsmKind::DigitIdentity;
  post.digit = {1.0, 1.0, 1, 5};
  LsmDraw d;
  d.weights = Eigen::VectorXd::Ones(1);
  d.params = Eigen::MatrixXd::Constant(1, 5, 1.0 - 1e-12);
  d.suff_a = Eigen::MatrixXd::Constant(1, 5, 1e12);
  d.suff_b = Eigen::MatrixXd::Ones(1, 5);
  post.draws.push_back(d);
  Rng rng = make_stream(6, 6);
  const auto samples = posterior_predictive_sample(post, 20, rng);
  for (const auto& s : samples) {
    CHECK(s.kind == SampleKind::BinaryVector);
    CHECK(s.payload.minCoeff() == 1.0);
  }
  CHECK_THROWS_AS(posterior_predictive_sample(post, 0, rng), std::invalid_argument);
}

TEST_CASE("round-trip serialisation preserves the posterior") {
  const LsmPosterior post = fit_digit_model(tiny_labeled(), 1.5, 0.5, 6, 11);
  const LsmPosterior back = lsm_from_json(lsm_to_json(post));
  CHECK(back.kind == post.kind);
  CHECK(back.digit.alpha_p == post.digit.alpha_p);
  REQUIRE(back.num_draws() == post.num_draws());
  for (Eigen::Index s = 0; s < post.num_draws(); ++s) {
    CHECK(back.draws[s].weights == post.draws[s].weights);
    CHECK(back.draws[s].params == post.draws[s].params);
    CHECK(back.draws[s].suff_a == post.draws[s].suff_a);
  }
}
