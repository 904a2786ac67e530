#include <doctest.h>

#include <stdexcept>

#include "metapop/params.hpp"
#include "test_util.hpp"

using metapop::ModelParams;
using testutil::TempDir;
using testutil::write_file;

TEST_CASE("defaults are the standard literature values") {
  const ModelParams p;
  CHECK(p.b == 6.0);
  CHECK(p.k_e == 1000.0);
  CHECK(p.k_l == 500.0);  // K_E / 2
  CHECK(p.s == doctest::Approx(1.0 / 3.0));
  CHECK(p.s_l == doctest::Approx(1.0 / 10.0));
  CHECK(p.d == doctest::Approx(1.0 / 3.0));
  CHECK(p.d_l == doctest::Approx(1.0 / 3.0));
  CHECK(p.d_m == doctest::Approx(1.0 / 14.0));
  CHECK(p.b_h == doctest::Approx(1.0 / (78.0 * 365.0)));
  CHECK(p.gamma_h == doctest::Approx(1.0 / 7.0));
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("validate rejects out-of-domain values") {
  ModelParams p;
  p.k_e = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = ModelParams{};
  p.d_m = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = ModelParams{};
  p.s = 0;
  p.d = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = ModelParams{};
  p.beta_h = -0.1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("parameter file round trip") {
  TempDir dir;
  ModelParams p;
  p.beta_h = 0.2;
  p.beta_m = 0.15;
  const std::string path = dir.path("params.txt");
  metapop::save_params(p, path);
  const ModelParams q = metapop::load_params(path);
  CHECK(q.b == p.b);
  CHECK(q.beta_h == p.beta_h);
  CHECK(q.beta_m == p.beta_m);
  CHECK(q.b_h == p.b_h);
}

TEST_CASE("parameter file rejects unknown keys with a suggestion") {
  TempDir dir;
  const std::string path = write_file(dir, "bad.txt",
                                      "b = 6\nk_e = 1000\nk_l = 500\ns = 0.333\n"
                                      "s_l = 0.1\nd = 0.333\nd_l = 0.333\n"
                                      "d_m = 0.0714\nb_h = 3.5e-5\ngamma_h = 0.1429\n"
                                      "betaH = 0.2\nbeta_m = 0.15\n");
  try {
    metapop::load_params(path);
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("betaH") != std::string::npos);
    CHECK(msg.find("beta_h") != std::string::npos);  // the suggestion
  }
}

TEST_CASE("parameter file requires the complete key set") {
  TempDir dir;
  const std::string path =
      write_file(dir, "partial.txt", "b = 6\nk_e = 1000\n");
  CHECK_THROWS_WITH_AS(metapop::load_params(path),
                       doctest::Contains("missing required key"),
                       std::invalid_argument);
}

TEST_CASE("parameter file rejects duplicates and malformed lines") {
  TempDir dir;
  CHECK_THROWS_AS(
      metapop::load_params(write_file(dir, "dup.txt", "b = 6\nb = 7\n")),
      std::invalid_argument);
  CHECK_THROWS_AS(
      metapop::load_params(write_file(dir, "junk.txt", "b 6\n")),
      std::invalid_argument);
  CHECK_THROWS_AS(
      metapop::load_params(write_file(dir, "nan.txt", "b = nope\n")),
      std::invalid_argument);
}
