#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/QR>

#include "doctest.h"
#include "glssbm/error.hpp"
#include "glssbm/model.hpp"
#include "helpers.hpp"

using namespace glssbm;

namespace {

ParamState two_node_state(int k) {
  ParamState s;
  s.labels = {0, k > 1 ? 1 : 0};
  s.positions = Eigen::MatrixXd::Zero(2, 1);
  s.positions(1, 0) = 1.5;
  s.pi = Eigen::VectorXd::Constant(k, 1.0 / k);
  s.tau = Eigen::MatrixXd::Zero(k, k);
  if (k > 1) {
    s.tau(0, 1) = 0.3;
    s.tau(1, 0) = 0.6;
  }
  s.beta = Eigen::VectorXd::Constant(k, 0.7);
  return s;
}

Eigen::MatrixXd random_orthogonal(int d, Rng& rng) {
  Eigen::MatrixXd a(d, d);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = draw_normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  return qr.householderQ();
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("config validation") {
    CHECK_NOTHROW(ModelConfig::make(3, 2).validate());
    CHECK(ModelConfig::make(3, 2).position_sd.size() == 3);
    CHECK(ModelConfig::make(1, 0).position_sd.front() == doctest::Approx(std::sqrt(5.0)));
    auto c = ModelConfig::make(2, 1);
    c.num_blocks = 0;
    CHECK_THROWS_AS(c.validate(), InputError);
    c = ModelConfig::make(2, 1);
    c.latent_dim = -1;
    CHECK_THROWS_AS(c.validate(), InputError);
    c = ModelConfig::make(2, 1);
    c.concentration = 0;
    CHECK_THROWS_AS(c.validate(), InputError);
    c = ModelConfig::make(2, 1);
    c.position_sd = {1.0};
    CHECK_THROWS_AS(c.validate(), InputError);
    c = ModelConfig::make(2, 1);
    c.beta_prior_sd = -1;
    CHECK_THROWS_AS(c.validate(), InputError);
  }

  TEST_CASE("state validation") {
    Rng rng(1);
    auto s = testutil::random_state(6, 3, 2, rng);
    CHECK_NOTHROW(s.validate());
    auto bad = s;
    bad.pi[0] += 1e-9;
    CHECK_THROWS_AS(bad.validate(), InputError);
    bad = s;
    bad.labels[2] = 3;
    CHECK_THROWS_AS(bad.validate(), InputError);
    bad = s;
    bad.tau(0, 1) = 1.2;
    CHECK_THROWS_AS(bad.validate(), InputError);
    bad = s;
    bad.tau(1, 1) = 7.0;  // diagonal is ignored
    CHECK_NOTHROW(bad.validate());
    CHECK(bad == s);
  }

  TEST_CASE("edge probability examples") {
    ParamState s;
    s.labels = {0, 0, 1};
    s.positions = Eigen::MatrixXd::Zero(3, 2);
    s.pi = Eigen::Vector2d(0.5, 0.5);
    s.tau = Eigen::MatrixXd::Zero(2, 2);
    s.tau(0, 1) = 0.123;
    s.tau(1, 0) = 0.456;
    s.beta = Eigen::Vector2d(0.0, 1.0);
    CHECK(edge_probability(s, 0, 1) == 0.5);
    CHECK(edge_probability(s, 0, 2) == 0.123);
    CHECK(edge_probability(s, 2, 1) == 0.456);
    s.beta[0] = 2.0;
    s.positions.row(1) << 3.0, 4.0;
    CHECK(edge_probability(s, 0, 1) == doctest::Approx(0.0474258731775668).epsilon(1e-14));
    CHECK_THROWS_AS(edge_probability(s, 1, 1), InputError);
  }

  TEST_CASE("logistic helpers are stable") {
    CHECK(logistic(0.0) == 0.5);
    CHECK(logistic(800.0) == 1.0);
    CHECK(logistic(-800.0) >= 0.0);
    CHECK(log_logistic(-800.0) == doctest::Approx(-800.0));
    CHECK(log_logistic(800.0) == 0.0);
    CHECK(std::isfinite(log_logistic(-1e5)));
    for (double x : {-30.0, -3.0, -0.1, 0.0, 0.4, 5.0, 35.0})
      CHECK(log_logistic(x) == doctest::Approx(std::log(logistic(x))).epsilon(1e-12));
  }

  TEST_CASE("two-node likelihoods") {
    const DirectedNetwork net = DirectedNetwork::from_adjacency(2, {0, 1, 0, 0});
    auto same = two_node_state(1);
    const double p = logistic(0.7 - 1.5);
    CHECK(log_likelihood(same, net) == doctest::Approx(std::log(p) + std::log(1 - p)).epsilon(1e-14));
    auto diff = two_node_state(2);
    CHECK(log_likelihood(diff, net) == doctest::Approx(std::log(0.3) + std::log(1 - 0.6)).epsilon(1e-14));
  }

  TEST_CASE("likelihood matches a naive double loop") {
    Rng rng(2024);
    for (int rep = 0; rep < 50; ++rep) {
      const int k = 1 + rep % 4;
      const int d = rep % 3;
      const auto s = testutil::random_state(5, k, d, rng);
      const auto net = testutil::random_network(5, 0.4, rng);
      CHECK(std::abs(log_likelihood(s, net) - testutil::naive_log_likelihood(s, net)) < 1e-12);
    }
  }

  TEST_CASE("contradicting exact probabilities give -inf") {
    const DirectedNetwork net = DirectedNetwork::from_adjacency(2, {0, 1, 0, 0});
    auto s = two_node_state(2);
    s.tau(0, 1) = 0.0;
    CHECK(log_likelihood(s, net) == -std::numeric_limits<double>::infinity());
    s.tau(0, 1) = 0.5;
    s.tau(1, 0) = 1.0;
    CHECK(log_likelihood(s, net) == -std::numeric_limits<double>::infinity());
    s.tau(1, 0) = 0.0;  // consistent with Y_21 = 0
    CHECK(std::isfinite(log_likelihood(s, net)));
    auto w = two_node_state(1);
    w.beta[0] = -1e6;
    CHECK(log_likelihood(w, net) < -1e5);
  }

  TEST_CASE("masked likelihood is additive over a dyad partition") {
    Rng rng(9);
    for (int rep = 0; rep < 20; ++rep) {
      const auto s = testutil::random_state(12, 3, 2, rng);
      const auto net = testutil::random_network(12, 0.3, rng);
      DyadMask a(12);
      std::bernoulli_distribution coin(0.5);
      for (std::size_t i = 0; i < 12; ++i)
        for (std::size_t j = 0; j < 12; ++j)
          if (i != j) a.set(i, j, coin(rng));
      const double full = log_likelihood(s, net);
      CHECK(log_likelihood(s, net, DyadMask::all_observed(12)) == full);
      CHECK(std::abs(full - (log_likelihood(s, net, a) + log_likelihood(s, net, a.complement()))) < 1e-10);
      CHECK(std::abs(log_likelihood(s, net, a) - testutil::naive_log_likelihood(s, net, &a)) < 1e-12);
    }
  }

  TEST_CASE("within-block symmetry, monotonicity and cap") {
    Rng rng(4);
    const auto s = testutil::random_state(10, 2, 3, rng);
    for (std::size_t i = 0; i < 10; ++i)
      for (std::size_t j = 0; j < 10; ++j) {
        if (i == j || s.labels[i] != s.labels[j]) continue;
        CHECK(edge_probability(s, i, j) == edge_probability(s, j, i));
        CHECK(edge_probability(s, i, j) <= logistic(s.beta[s.labels[i]]));
      }
    ParamState m;
    m.labels = {0, 0};
    m.positions = Eigen::MatrixXd::Zero(2, 1);
    m.pi = Eigen::VectorXd::Ones(1);
    m.tau = Eigen::MatrixXd::Zero(1, 1);
    m.beta = Eigen::VectorXd::Zero(1);
    double prev = 2.0;
    for (double dist = 0.0; dist < 10.0; dist += 0.25) {
      m.positions(1, 0) = dist;
      const double p = edge_probability(m, 0, 1);
      CHECK(p < prev);
      prev = p;
    }
    m.positions(1, 0) = 1.0;
    prev = -1.0;
    for (double b = -5.0; b < 5.0; b += 0.25) {
      m.beta[0] = b;
      const double p = edge_probability(m, 0, 1);
      CHECK(p > prev);
      prev = p;
    }
  }

  TEST_CASE("rigid motion of one block leaves the likelihood unchanged") {
    Rng rng(12);
    for (int rep = 0; rep < 30; ++rep) {
      const int d = 1 + rep % 3;
      auto s = testutil::random_state(15, 3, d, rng);
      const auto net = testutil::random_network(15, 0.3, rng);
      const double before = log_likelihood(s, net);
      const auto q = random_orthogonal(d, rng);
      Eigen::RowVectorXd shift(d);
      for (int c = 0; c < d; ++c) shift[c] = draw_normal(rng, 0.0, 4.0);
      for (std::size_t i = 0; i < 15; ++i)
        if (s.labels[i] == 1)
          s.positions.row(static_cast<Eigen::Index>(i)) = s.positions.row(static_cast<Eigen::Index>(i)) * q + shift;
      CHECK(std::abs(log_likelihood(s, net) - before) < 1e-10);
    }
  }

  TEST_CASE("label permutation leaves the likelihood unchanged exactly") {
    Rng rng(13);
    for (int rep = 0; rep < 30; ++rep) {
      const int k = 2 + rep % 3;
      const auto s = testutil::random_state(14, k, 2, rng);
      const auto net = testutil::random_network(14, 0.35, rng);
      std::vector<int> perm(static_cast<std::size_t>(k));
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      ParamState p = s;
      for (auto& g : p.labels) g = perm[static_cast<std::size_t>(g)];
      for (int a = 0; a < k; ++a) {
        p.pi[perm[a]] = s.pi[a];
        p.beta[perm[a]] = s.beta[a];
        for (int b = 0; b < k; ++b) p.tau(perm[a], perm[b]) = s.tau(a, b);
      }
      CHECK(log_likelihood(p, net) == log_likelihood(s, net));
    }
  }

  TEST_CASE("prior draws") {
    Rng rng(77);
    const auto one = sample_from_prior(ModelConfig::make(1, 0), 6, rng);
    CHECK(one.pi.size() == 1);
    CHECK(one.pi[0] == 1.0);
    CHECK(one.positions.cols() == 0);
    for (int g : one.labels) CHECK(g == 0);

    const auto cfg = ModelConfig::make(2, 2);
    std::vector<double> b;
    b.reserve(100000);
    for (int t = 0; t < 100000; ++t) b.push_back(sample_from_prior(cfg, 1, rng).beta[0]);
    const double se = 5.0 / std::sqrt(100000.0);
    CHECK(std::abs(testutil::mean(b)) < 3 * se);
    CHECK(std::abs(testutil::variance(b) - 25.0) < 0.05 * 25.0);
  }

  TEST_CASE("prior positions follow each block's variance") {
    Rng rng(78);
    auto cfg = ModelConfig::make(2, 1);
    cfg.position_sd = {1.0, 3.0};
    std::vector<double> z0, z1;
    for (int t = 0; t < 2000; ++t) {
      const auto s = sample_from_prior(cfg, 20, rng);
      for (std::size_t i = 0; i < 20; ++i) (s.labels[i] == 0 ? z0 : z1).push_back(s.positions(static_cast<Eigen::Index>(i), 0));
    }
    CHECK(std::abs(testutil::variance(z0) - 1.0) < 0.05);
    CHECK(std::abs(testutil::variance(z1) - 9.0) < 0.45);
  }

  TEST_CASE("network generation") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng rng(seed);
      ParamState s = sample_from_prior(ModelConfig::make(3, 0), 50, rng);
      s.tau.setZero();
      s.beta.setConstant(-50.0);
      CHECK(generate_network(s, rng).edge_count() == 0);
      ParamState full = sample_from_prior(ModelConfig::make(1, 0), 50, rng);
      full.beta[0] = 50.0;
      CHECK(generate_network(full, rng).edge_count() == 50u * 49u);
    }
    Rng rng(5);
    ParamState s;
    s.labels.assign(150, 0);
    for (std::size_t i = 75; i < 150; ++i) s.labels[i] = 1;
    s.positions = Eigen::MatrixXd::Zero(150, 0);
    s.pi = Eigen::Vector2d(0.5, 0.5);
    s.tau = Eigen::MatrixXd::Zero(2, 2);
    s.tau(0, 1) = 0.3;
    s.tau(1, 0) = 0.3;
    s.beta = Eigen::Vector2d(0.0, 0.0);
    const auto net = generate_network(s, rng);
    double edges = 0, dyads = 0;
    for (std::size_t i = 0; i < 150; ++i)
      for (std::size_t j = 0; j < 150; ++j)
        if (s.labels[i] != s.labels[j]) {
          dyads += 1;
          edges += net.edge(i, j) ? 1 : 0;
        }
    CHECK(dyads >= 1e4);
    CHECK(std::abs(edges / dyads - 0.3) < 0.02);
  }

  TEST_CASE("separation bounds: constructed cases") {
    ParamState s;
    s.labels = {0, 0, 1, 1};
    s.positions = Eigen::MatrixXd::Zero(4, 2);
    s.pi = Eigen::Vector2d(0.5, 0.5);
    s.tau = Eigen::MatrixXd::Constant(2, 2, 0.1);
    s.beta = Eigen::Vector2d(1.0, -1.0);
    auto r = check_separation_bounds(s);
    CHECK(r.bound_violations() == 0);
    CHECK(r.cap_violations() == 0);
    for (const auto& p : r.pairs) {
      CHECK(p.max_distance == 0.0);
      CHECK(p.min_distance == 0.0);
    }

    ParamState t;
    t.labels = {0, 1};
    t.positions = Eigen::MatrixXd::Zero(2, 2);
    t.positions.row(1) << 7.0, 0.0;
    t.pi = Eigen::Vector3d(0.4, 0.4, 0.2);
    t.tau = Eigen::MatrixXd::Constant(3, 3, 0.1);
    t.beta = Eigen::Vector3d(0.0, 0.0, 0.0);
    r = check_separation_bounds(t);
    REQUIRE(r.pairs.size() == 2);
    CHECK(r.pairs[0].max_distance == 7.0);
    CHECK(r.pairs[0].min_distance == 7.0);
    CHECK(r.pairs[0].bound_holds);
    CHECK(r.blocks[0].diameter == 0.0);
    CHECK(r.empty_blocks == std::vector<int>{2});
  }

  TEST_CASE("separation bounds hold on random states") {
    Rng rng(31);
    std::size_t checks = 0;
    for (int rep = 0; rep < 300; ++rep) {
      auto s = testutil::random_state(20, 1 + rep % 5, 1 + rep % 3, rng);
      const auto r = check_separation_bounds(s);
      CHECK(r.bound_violations() == 0);
      CHECK(r.cap_violations() == 0);
      for (const auto& b : r.blocks) checks += b.cap_checks;
      for (const auto& p : r.pairs) CHECK(p.prob_lower <= p.prob_upper);
    }
    CHECK(checks > 0);
  }

  TEST_CASE("JSON round trip uses 1-based labels") {
    Rng rng(8);
    const auto s = testutil::random_state(7, 3, 2, rng);
    const nlohmann::json j = s;
    CHECK(j.at("gamma")[0].get<int>() == s.labels[0] + 1);
    CHECK(j.at("tau")[1][1].is_null());
    const auto back = j.get<ParamState>();
    CHECK(back == s);
    auto broken = j;
    broken["gamma"][0] = 9;
    CHECK_THROWS_AS(broken.get<ParamState>(), InputError);
    broken = j;
    broken.erase("pi");
    CHECK_THROWS_AS(broken.get<ParamState>(), InputError);
  }
}
