#include <cmath>
#include <numbers>

#include "doctest.h"
#include "vsamem/error.hpp"
#include "vsamem/theory/accuracy.hpp"
#include "vsamem/theory/collisions.hpp"
#include "vsamem/theory/comparisons.hpp"
#include "vsamem/theory/diffusion.hpp"
#include "vsamem/theory/information.hpp"
#include "vsamem/theory/sensitivity.hpp"
#include "vsamem/theory/special.hpp"

using namespace vsamem;
using namespace vsamem::theory;

TEST_SUITE("theory") {
  TEST_CASE("special functions") {
    CHECK(dilog(1.0) == doctest::Approx(std::numbers::pi * std::numbers::pi / 6).epsilon(1e-10));
    CHECK(dilog(0.0) == 0.0);
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(log_normal_cdf(-40.0) == doctest::Approx(-800.0 - std::log(40.0 * std::sqrt(2 * std::numbers::pi))).epsilon(1e-5));
  }

  TEST_CASE("accuracy limits") {
    CHECK(p_corr_numeric(0.0, 10) == doctest::Approx(0.1).epsilon(1e-6));
    CHECK(p_corr_numeric(1.3, 2) == doctest::Approx(normal_cdf(1.3 / std::sqrt(2.0))).epsilon(1e-6));
    CHECK(p_corr_numeric(12.0, 27) > 0.999999);
    // equal variances reduce to the shifted form
    CHECK(p_corr_gaussian(1.7, 1.0, 27) == doctest::Approx(p_corr_numeric(1.7, 27)).epsilon(1e-8));
  }

  TEST_CASE("detection rates at extreme thresholds") {
    const auto low = p_corr_detection(3.0, 10, 0.0, 1.0);
    CHECK(low.hit == doctest::Approx(p_corr_numeric(3.0, 10)).epsilon(1e-3));
    const auto high = p_corr_detection(3.0, 10, 5.0, 0.5);
    CHECK(high.rejection > 0.999);
  }

  TEST_CASE("sensitivity of a linear reset memory") {
    TheoryQuery q;
    q.neurons = 1000;
    q.alphabet = 27;
    q.length = 100;
    const double s = sensitivity(q, 0);
    CHECK(s == doctest::Approx(std::sqrt(1000.0 / 99.0)).epsilon(0.02));
    q.lambda = 0.99;
    CHECK(sensitivity(q, 50) < sensitivity(q, 0));
    CHECK(decay_sum(1.0, 7) == 7.0);
  }

  TEST_CASE("invalid queries") {
    TheoryQuery q;
    q.lambda = 1.2;
    CHECK_THROWS_AS(q.validate(), Error);
    q = {};
    q.neurons = 0;
    CHECK_THROWS_AS(q.validate(), Error);
    q = {};
    q.length = kInfinite;  // λ = 1 buffer never forgets
    CHECK_THROWS_AS(sensitivity(q, 0), Error);
  }

  TEST_CASE("collision distribution") {
    const auto stats = collision_distribution(10, 1024);
    double total = 0.0;
    for (double p : stats.p) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(collision_accuracy(30, 4) > 0.999999);
    CHECK(collision_accuracy(12, 4096) == doctest::Approx(1 - std::exp(-1.0)).epsilon(1e-3));
  }

  TEST_CASE("time constants") {
    CHECK(time_constant_lambda(0.99) == doctest::Approx(-1 / std::log(0.99)));
    CHECK(lambda_for_time_constant(time_constant_lambda(0.995)) == doctest::Approx(0.995));
    CHECK(time_constant_clipped(20) > time_constant_clipped(10));
    CHECK(equilibrium_variance(Activation::clipped(1.0)) < 1.0);
  }

  TEST_CASE("analog information") {
    CHECK(capacity_at_snr(1.0) == doctest::Approx(0.5));
    CHECK(info_analog(3.0) == doctest::Approx(1.0));
    CHECK(rho_from_snr(snr_from_rho(0.7)) == doctest::Approx(0.7));
  }

  TEST_CASE("buffer information agrees with direct summation") {
    TheoryQuery q;
    q.neurons = 500;
    q.alphabet = 5;
    q.length = kInfinite;
    q.lambda = 0.99;
    q.noise_var = 0.01;
    q.moments = analytic_moments(CodeFamily::hrr, 500, 0.0);
    CHECK(info_total_analog_buffer(q) ==
          doctest::Approx(info_total_analog_buffer_direct(q)).epsilon(1e-8));
  }

  TEST_CASE("Plate's estimate stays below ours when D is large") {
    for (double m : {1.0, 10.0, 50.0})
      CHECK(plate_all_correct(4.0, 4096, m, 0.5) <= our_all_correct(4.0, 4096, m, 0.5) + 1e-9);
  }
}
