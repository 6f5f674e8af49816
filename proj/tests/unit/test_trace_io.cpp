#include <cmath>

#include "doctest.h"
#include "glssbm/error.hpp"
#include "glssbm/trace_io.hpp"
#include "helpers.hpp"

using namespace glssbm;

TEST_SUITE("trace_io") {
  TEST_CASE("trace round trip") {
    Rng rng(1);
    const auto net = testutil::random_network(9, 0.3, rng);
    SamplerConfig sc;
    sc.iterations = 60;
    sc.burn_in = 10;
    sc.thin = 5;
    sc.seed = 17;
    auto model = ModelConfig::make(3, 2);
    model.tau_prior_a = 2.0;
    const auto tr = run_chain(net, DyadMask::all_observed(9), model, sc);
    testutil::TempDir dir("trace");
    write_trace(tr, net, dir.path);
    for (const char* f : {"gamma.csv", "beta.csv", "tau.csv", "pi.csv", "z.jsonl", "loglik.csv", "trace.json"})
      CHECK(std::filesystem::exists(dir / f));
    CHECK(testutil::read_file(dir / "beta.csv").rfind("beta_1,beta_2,beta_3\n", 0) == 0);
    CHECK(testutil::read_file(dir / "tau.csv").rfind("tau_1_2,tau_1_3,tau_2_1,tau_2_3,tau_3_1,tau_3_2\n", 0) == 0);

    const auto back = read_trace(dir.path);
    REQUIRE(back.size() == tr.size());
    for (std::size_t t = 0; t < tr.size(); ++t) {
      CHECK(back.samples[t] == tr.samples[t]);
      CHECK(back.loglik[t] == tr.loglik[t]);
    }
    CHECK(back.model.num_blocks == 3);
    CHECK(back.model.tau_prior_a == 2.0);
    CHECK(back.sampler.seed == 17);
    CHECK(back.acceptance.node_accepted == tr.acceptance.node_accepted);
  }

  TEST_CASE("state JSON round trip") {
    Rng rng(2);
    for (int rep = 0; rep < 20; ++rep) {
      const auto s = testutil::random_state(6, 1 + rep % 4, rep % 3, rng);
      testutil::TempDir dir("state");
      write_state_json(s, dir / "s.json");
      CHECK(read_state_json(dir / "s.json") == s);
    }
  }

  TEST_CASE("missing or corrupt files") {
    testutil::TempDir dir("bad");
    CHECK_THROWS_AS(read_trace(dir / "nope"), Error);
    testutil::write_file(dir / "s.json", "{not json");
    CHECK_THROWS_AS(read_state_json(dir / "s.json"), Error);
  }
}
