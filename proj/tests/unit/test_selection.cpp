#include <cmath>
#include <vector>

#include "doctest.h"
#include "glssbm/error.hpp"
#include "glssbm/postprocess.hpp"
#include "glssbm/selection.hpp"
#include "helpers.hpp"

using namespace glssbm;

TEST_SUITE("selection") {
  TEST_CASE("hand-computed WAIC") {
    const std::vector<double> ll{-10.0, -12.0};
    const auto w = waic(ll);
    CHECK(w.pred == doctest::Approx(std::log((std::exp(-10.0) + std::exp(-12.0)) / 2.0)).epsilon(1e-14));
    CHECK(w.pred == doctest::Approx(-10.5662).epsilon(1e-5));
    CHECK(w.penalty == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(w.waic == doctest::Approx(-12.5662).epsilon(1e-5));
    CHECK(w.waic == w.pred - w.penalty);

    const std::vector<double> flat(5, -42.5);
    const auto f = waic(flat);
    CHECK(f.pred == doctest::Approx(-42.5).epsilon(1e-15));
    CHECK(f.penalty == 0.0);
    CHECK(f.waic == f.pred);
  }

  TEST_CASE("integer-valued terms combine exactly") {
    CHECK(make_waic(-13196, 1).waic == -13197);
    CHECK(make_waic(-10251, 106).waic == -10357);
  }

  TEST_CASE("WAIC needs two samples") {
    CHECK_THROWS_AS(waic(std::vector<double>{-1.0}), InputError);
    CHECK_THROWS_AS(waic(std::vector<double>{}), InputError);
  }

  TEST_CASE("very negative log-likelihoods do not underflow") {
    const std::vector<double> ll{-1e6, -1e6 - 1.0, -1e6 + 0.5};
    const auto w = waic(ll);
    CHECK(std::isfinite(w.pred));
    CHECK(w.pred > -1e6 - 1.0);
    CHECK(w.pred < -1e6 + 0.5);
  }

  TEST_CASE("duplicating a sample keeps the penalty non-negative") {
    Rng rng(1);
    for (int rep = 0; rep < 100; ++rep) {
      std::vector<double> ll;
      for (int t = 0; t < 2 + rep % 8; ++t) ll.push_back(draw_normal(rng, -500.0, 3.0));
      const auto base = waic(ll);
      ll.push_back(ll[static_cast<std::size_t>(rep) % ll.size()]);
      const auto dup = waic(ll);
      CHECK(base.penalty >= 0.0);
      CHECK(dup.penalty >= 0.0);
      CHECK(std::abs(dup.penalty - base.penalty) < base.penalty + 1.0);
    }
  }

  TEST_CASE("WAIC is unchanged by relabelling and alignment") {
    Rng rng(2);
    const auto net = testutil::random_network(14, 0.3, rng);
    SamplerConfig sc;
    sc.iterations = 300;
    sc.burn_in = 100;
    sc.thin = 4;
    const auto tr = run_chain(net, DyadMask::all_observed(14), ModelConfig::make(3, 2), sc);
    auto post = align_trace(relabel_trace(tr), classical_mds(net, 2));
    for (std::size_t t = 0; t < post.size(); ++t) post.loglik[t] = log_likelihood(post.samples[t], net);
    const auto a = waic(tr);
    const auto b = waic(post);
    CHECK(std::abs(a.waic - b.waic) < 1e-8);
    CHECK(std::abs(a.pred - b.pred) < 1e-9);
  }

  TEST_CASE("pointwise WAIC is finite and its penalty non-negative") {
    Rng rng(3);
    const auto net = testutil::random_network(10, 0.3, rng);
    SamplerConfig sc;
    sc.iterations = 200;
    sc.burn_in = 50;
    sc.thin = 3;
    const auto tr = run_chain(net, DyadMask::all_observed(10), ModelConfig::make(2, 1), sc);
    const auto w = waic_pointwise(tr, net, DyadMask::all_observed(10));
    CHECK(std::isfinite(w.waic));
    CHECK(w.penalty >= 0.0);
    CHECK(w.waic == w.pred - w.penalty);
  }

  TEST_CASE("best-row rule and tie-breaking") {
    std::vector<GridRow> rows{{0, 3, make_waic(-10, 1)}, {1, 2, make_waic(-9, 2)}, {2, 2, make_waic(-10, 1)},
                              {0, 2, make_waic(-12, -1)}, {1, 4, make_waic(-20, 0)}};
    // -11 three times: (0,3), (1,2), (2,2) and (0,2).
    CHECK(best_grid_row(rows) == 3);
    rows[3].result = make_waic(-30, 0);
    CHECK(best_grid_row(rows) == 1);
    rows[4].result = make_waic(-5, 0);
    CHECK(best_grid_row(rows) == 4);
    CHECK_THROWS_AS(best_grid_row(std::vector<GridRow>{}), InputError);
  }

  TEST_CASE("small grid") {
    Rng rng(4);
    const auto net = testutil::random_network(10, 0.3, rng);
    SamplerConfig sc;
    sc.iterations = 150;
    sc.burn_in = 50;
    sc.thin = 2;
    sc.seed = 5;
    const std::vector<int> dims{0, 1}, blocks{1, 2};
    const auto g = fit_grid(net, DyadMask::all_observed(10), dims, blocks, ModelConfig::make(1, 0), sc);
    REQUIRE(g.rows.size() == 4);
    for (const auto& r : g.rows) {
      CHECK(std::isfinite(r.result.waic));
      CHECK(g.best_row().result.waic >= r.result.waic);
    }
    CHECK(g.rows[0].dim == 0);
    CHECK(g.rows[0].blocks == 1);

    const auto threaded = fit_grid(net, DyadMask::all_observed(10), dims, blocks, ModelConfig::make(1, 0), sc, 3);
    for (std::size_t c = 0; c < 4; ++c) CHECK(threaded.rows[c].result.waic == g.rows[c].result.waic);
    CHECK(threaded.best == g.best);

    testutil::TempDir dir("grid");
    write_grid_csv(g, dir / "sel.csv");
    const auto text = testutil::read_file(dir / "sel.csv");
    CHECK(text.rfind("dimension,k,pred,penalty,waic\n0,1,", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 5);

    const std::vector<int> bad{0};
    const std::vector<int> zero_k{0};
    CHECK_THROWS_WITH_AS(fit_grid(net, DyadMask::all_observed(10), bad, zero_k, ModelConfig::make(1, 0), sc),
                         doctest::Contains("d=0 K=0"), Error);
  }

  TEST_CASE("cell seeds differ across cells") {
    CHECK(grid_cell_seed(1, 0, 1) != grid_cell_seed(1, 1, 0));
    CHECK(grid_cell_seed(1, 2, 3) != grid_cell_seed(2, 2, 3));
    CHECK(grid_cell_seed(1, 2, 3) == grid_cell_seed(1, 2, 3));
  }
}
