// Run-description parsing: typed extraction, canonical serialization with
// exact double round trips, line-numbered diagnostics, and range validation.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <string>

#include "cbf/config.hpp"
#include "cbf/exceptions.hpp"
#include "cbf/initial_conditions.hpp"
#include "cbf/norms.hpp"

using namespace cbf;

namespace {

bool mentions(const std::string& msg, const std::string& needle) {
  return msg.find(needle) != std::string::npos;
}

// Expects parse_config to throw and the message to carry the given fragment
// (typically "line N").
void expect_parse_error(const std::string& text, const std::string& fragment) {
  try {
    parse_config(text);
    FAIL("expected ConfigError for:\n" << text);
  } catch (const ConfigError& e) {
    INFO("message: " << e.what());
    CHECK(mentions(e.what(), fragment));
  }
}

bool same_config(const RunConfig& a, const RunConfig& b) {
  return a.params.mu == b.params.mu && a.params.alpha == b.params.alpha &&
         a.params.beta == b.params.beta && a.params.r == b.params.r &&
         a.K == b.K && a.N == b.N && a.T == b.T &&
         a.control.dt_init == b.control.dt_init &&
         a.control.dt_min == b.control.dt_min &&
         a.control.dt_max == b.control.dt_max &&
         a.control.abs_tol == b.control.abs_tol &&
         a.control.rel_tol == b.control.rel_tol &&
         a.control.blowup_factor == b.control.blowup_factor &&
         a.ic.kind == b.ic.kind && a.ic.seed == b.ic.seed &&
         a.ic.slope == b.ic.slope && a.ic.amplitude == b.ic.amplitude &&
         a.sample_cadence == b.sample_cadence &&
         a.checkpoint_cadence == b.checkpoint_cadence;
}

} // namespace

//======================================================================
// parsing and round trips
//======================================================================

TEST_CASE("defaults serialize and round-trip as a fixed point") {
  RunConfig def;
  std::string canon = serialize_config(def);
  RunConfig back = parse_config(canon);
  CHECK(same_config(def, back));
  CHECK(serialize_config(back) == canon);
}

TEST_CASE("free-form text parses and canonicalizes idempotently") {
  std::string text =
      "# desk-scale run\n"
      "[time]\n"
      "T=0.5 ; landing time\n"
      "dt_init = 1e-3\n"
      "dt_min  =   1e-3\n"
      "dt_max = 1e-3\n"
      "\n"
      "[model]\n"
      "mu = 0.1\n"
      "beta = 0.3\n"
      "r = 3\n"
      "[resolution]\n"
      "K = 10\n"
      "N = 32\n";
  RunConfig cfg = parse_config(text);
  CHECK(cfg.params.mu == 0.1);
  CHECK(cfg.params.alpha == 0.0); // untouched default
  CHECK(cfg.params.beta == 0.3);
  CHECK(cfg.params.r == 3.0);
  CHECK(cfg.K == 10);
  CHECK(cfg.N == 32);
  CHECK(cfg.T == 0.5);
  CHECK(cfg.control.dt_init == 1e-3);
  CHECK(cfg.control.fixed_dt());
  CHECK(cfg.ic.kind == IcKind::taylor_green);

  std::string canon = serialize_config(cfg);
  CHECK(serialize_config(parse_config(canon)) == canon);
}

TEST_CASE("awkward doubles survive the text round trip bit-exactly") {
  RunConfig cfg;
  cfg.params.mu = std::nextafter(0.1, 1.0);
  cfg.params.beta = 1.0 / 3.0;
  cfg.params.r = 3.0000000000000004; // one ulp above 3
  cfg.T = 0.30000000000000004;
  cfg.control.dt_init = 1e-3;
  cfg.control.dt_min = 9.999999999999998e-4;
  cfg.control.dt_max = 1e-2;
  cfg.control.abs_tol = 1.2345678901234567e-11;
  RunConfig back = parse_config(serialize_config(cfg));
  CHECK(same_config(cfg, back));
}

TEST_CASE("random_spectrum parameters parse and serialize") {
  std::string text =
      "[model]\nmu = 0.5\nbeta = 0.5\nr = 3\n"
      "[resolution]\nK = 6\nN = 20\n"
      "[time]\nT = 1\n"
      "[ic]\nkind = random_spectrum\nseed = 7\nslope = -2\namplitude = 1\n";
  RunConfig cfg = parse_config(text);
  CHECK(cfg.ic.kind == IcKind::random_spectrum);
  CHECK(cfg.ic.seed == 7);
  CHECK(cfg.ic.slope == -2.0);
  CHECK(cfg.ic.amplitude == 1.0);
  std::string canon = serialize_config(cfg);
  CHECK(mentions(canon, "seed = 7"));
  CHECK(serialize_config(parse_config(canon)) == canon);

  // Canonical output hides the spectrum knobs for closed-form kinds.
  RunConfig tg;
  CHECK_FALSE(mentions(serialize_config(tg), "seed"));
}

//======================================================================
// diagnostics
//======================================================================

TEST_CASE("malformed input is rejected with line numbers") {
  expect_parse_error("[model]\nmu = 0.1\nforchheimer\n", "line 3");
  expect_parse_error("mu = 0.1\n", "outside any [section]");
  expect_parse_error("[model\nmu = 0.1\n", "line 1");
  expect_parse_error("[]\n", "empty section name");
  expect_parse_error("[model]\n= 0.1\n", "empty key");
  expect_parse_error("[model]\nmu =\n", "empty value");
  expect_parse_error("[model]\nmu = fast\n", "expected a number");
  expect_parse_error("[resolution]\nK = 6.5\n", "expected an integer");
  expect_parse_error("[model]\nmu = 0.1\nmu = 0.2\n", "duplicate key 'mu'");
  expect_parse_error("[model]\nviscosity = 0.1\n", "unknown key 'viscosity'");
  expect_parse_error("[forcing]\neps = 1\n", "unknown section [forcing]");
  expect_parse_error("[ic]\nseed = -3\nkind = random_spectrum\n", "nonnegative");
}

TEST_CASE("spectrum knobs under a closed-form kind are rejected") {
  expect_parse_error("[ic]\nkind = shear\nseed = 7\n", "random_spectrum");
  expect_parse_error("[ic]\nslope = -2\n", "random_spectrum"); // default kind
  expect_parse_error("[ic]\nkind = vortex\n", "unknown initial condition");
}

TEST_CASE("range validation") {
  auto with = [](const std::string& body) { return parse_config(body); };
  // N >= 2K+2 at r <= 3, N >= 2K+1 above.
  CHECK_THROWS_AS(with("[resolution]\nK = 10\nN = 21\n"), ConfigError);
  CHECK_THROWS_AS(with("[model]\nr = 3\n[resolution]\nK = 10\nN = 21\n"),
                  ConfigError);
  CHECK(with("[model]\nr = 4\nbeta = 1\n[resolution]\nK = 10\nN = 21\n").N == 21);
  CHECK(with("[resolution]\nK = 10\nN = 22\n").N == 22);

  CHECK_THROWS_AS(with("[resolution]\nK = 0\nN = 22\n"), ConfigError);
  CHECK_THROWS_AS(with("[time]\nT = -0.5\n"), ConfigError);
  CHECK(with("[time]\nT = 0\n").T == 0.0); // degenerate run is legal
  CHECK_THROWS_AS(with("[time]\nabs_tol = 0\n"), ConfigError);
  CHECK_THROWS_AS(with("[time]\nrel_tol = -1e-8\n"), ConfigError);
  CHECK_THROWS_AS(with("[time]\ndt_min = 1e-2\ndt_max = 1e-3\n"), ConfigError);
  CHECK_THROWS_AS(with("[time]\ndt_init = 1\n"), ConfigError); // above dt_max
  CHECK_THROWS_AS(with("[time]\nblowup_factor = 1\n"), ConfigError);
  CHECK_THROWS_AS(with("[output]\nsample_cadence = 0\n"), ConfigError);
  CHECK_THROWS_AS(with("[output]\ncheckpoint_cadence = -1\n"), ConfigError);
  CHECK_THROWS_AS(with("[model]\nmu = 0\n"), ConfigError);
  CHECK_THROWS_AS(with("[model]\nbeta = -1\n"), ConfigError);
  CHECK_THROWS_AS(with("[model]\nr = 0.5\nbeta = 1\n"), ConfigError);
}

//======================================================================
// construction
//======================================================================

TEST_CASE("initial_condition dispatches on kind at the configured size") {
  RunConfig cfg;
  cfg.K = 6;
  cfg.N = 20;

  cfg.ic.kind = IcKind::shear;
  SpectralField u = initial_condition(cfg);
  CHECK(u.K == 6);
  CHECK(u.grid_n == 20);
  SpectralField ref = ic_shear(6, 20);
  CHECK(l2_norm_sq(u) == l2_norm_sq(ref));

  cfg.ic.kind = IcKind::random_spectrum;
  cfg.ic.seed = 7;
  cfg.ic.amplitude = 1.0;
  SpectralField a = initial_condition(cfg);
  SpectralField b = initial_condition(cfg);
  CHECK(l2_norm_sq(a) == l2_norm_sq(b)); // deterministic in the seed
  cfg.ic.seed = 8;
  CHECK(l2_norm_sq(initial_condition(cfg)) != l2_norm_sq(a));
}

TEST_CASE("load_config reports the path") {
  try {
    load_config("/nonexistent/run.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(mentions(e.what(), "/nonexistent/run.cfg"));
  }
}
