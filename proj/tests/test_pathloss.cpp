#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "d2dshare/pathloss.hpp"

using namespace d2dshare;

TEST_CASE("log-distance loss and gain", "[pathloss]") {
  const PathlossModel d2d{40.0, 28.0};
  const PathlossModel cellular{37.6, 15.3};

  CHECK(path_loss_db(d2d, 30.0) == Catch::Approx(87.085).margin(1e-3));
  CHECK(gain(d2d, 30.0) == Catch::Approx(std::pow(10.0, -8.7085)).epsilon(1e-4));
  CHECK(path_loss_db(cellular, 200.0) == Catch::Approx(101.819).margin(1e-3));
  CHECK(path_loss_db(d2d, 1.0) == Catch::Approx(28.0).margin(1e-12));
  CHECK_THROWS_AS(path_loss_db(d2d, 0.0), NonPositiveDistance);
  CHECK_THROWS_AS(gain(d2d, -3.0), NonPositiveDistance);
}

TEST_CASE("inversion", "[pathloss]") {
  const PathlossModel d2d{40.0, 28.0};
  CHECK(invert(d2d, 92.0) == Catch::Approx(39.8107).margin(1e-3));
  CHECK(invert(d2d, 28.0) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("round-trip and monotonicity", "[pathloss]") {
  const PathlossModel d2d{40.0, 28.0};
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> logr(0.0, 4.0);
  double prev_r = 0.0, prev_gain = 1e9;
  for (int k = 0; k < 200; ++k) {
    const double r = std::pow(10.0, logr(rng));
    const double loss = path_loss_db(d2d, r);
    CHECK(path_loss_db(d2d, invert(d2d, loss)) == Catch::Approx(loss).margin(1e-9));
  }
  for (double r = 1.0; r <= 1e4; r *= 1.7) {
    CHECK(gain(d2d, r) < prev_gain);
    CHECK(invert(d2d, path_loss_db(d2d, r)) > prev_r);
    prev_gain = gain(d2d, r);
    prev_r = r;
  }
}

TEST_CASE("power-law equivalence of the dB slope", "[pathloss]") {
  const PathlossModel cellular{37.6, 15.3};
  CHECK(cellular.exponent() == Catch::Approx(3.76));
  // gain ratio equals (r/d)^-a regardless of intercept
  CHECK(gain_ratio(cellular, 50.0, 10.0) ==
        Catch::Approx(gain(cellular, 50.0) / gain(cellular, 10.0)).epsilon(1e-12));
}
