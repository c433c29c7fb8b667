#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "vsamem/codebook.hpp"
#include "vsamem/error.hpp"
#include "vsamem/recurrent.hpp"
#include "vsamem/rng.hpp"
#include "vsamem/vsa.hpp"

using namespace vsamem;

namespace {

Eigen::VectorXd gaussian(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXd v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

const RecurrenceKind kAllKinds[] = {
    RecurrenceKind::identity,  RecurrenceKind::permutation,      RecurrenceKind::random_permutation,
    RecurrenceKind::circulant, RecurrenceKind::circulant_paired, RecurrenceKind::haar,
    RecurrenceKind::phasor,
};

}  // namespace

TEST_SUITE("vsa-core") {
  TEST_CASE("recurrent operators are orthogonal") {
    for (auto kind : kAllKinds) {
      CAPTURE(to_string(kind));
      const auto w = make_recurrent(kind, 48, 1.0, 3);
      const Eigen::MatrixXd q = w.dense();
      CHECK((q.transpose() * q - Eigen::MatrixXd::Identity(48, 48)).norm() < 1e-9);
    }
  }

  TEST_CASE("negative powers invert") {
    const auto v = gaussian(40, 1);
    for (auto kind : kAllKinds) {
      CAPTURE(to_string(kind));
      const auto w = make_recurrent(kind, 40, 0.8, 5);
      CHECK((w.apply(w.apply(v, 7), -7) - v).norm() < 1e-9);
      CHECK(w.apply(v, 2).norm() == doctest::Approx(0.64 * v.norm()).epsilon(1e-12));
    }
  }

  TEST_CASE("matrix-free apply matches the dense operator") {
    const auto v = gaussian(32, 2);
    for (auto kind : kAllKinds) {
      CAPTURE(to_string(kind));
      const auto w = make_recurrent(kind, 32, 1.0, 9);
      const Eigen::MatrixXd q = w.dense();
      CHECK((w.apply_orthogonal(v, 3) - q * q * q * v).norm() < 1e-9);
    }
  }

  TEST_CASE("cycle lengths") {
    CHECK(RecurrentOperator::cyclic_shift(17).cycle_length() == 17);
    CHECK(RecurrentOperator::identity(5).cycle_length() == 1);
    CHECK(RecurrentOperator::from_permutation({1, 0, 3, 4, 2}).cycle_length() == 6);
    CHECK_FALSE(make_recurrent(RecurrenceKind::haar, 8, 1.0, 0).cycle_length().has_value());
  }

  TEST_CASE("invalid operators are rejected") {
    Eigen::VectorXd key = Eigen::VectorXd::Zero(8);
    key[0] = 2.0;  // spectrum of modulus 2
    CHECK_THROWS_AS(RecurrentOperator::circulant_from_key(key, 1.0), Error);
    CHECK_THROWS_AS(RecurrentOperator::from_matrix(2.0 * Eigen::MatrixXd::Identity(4, 4)), Error);
    CHECK_THROWS_AS(RecurrentOperator::from_permutation({0, 0, 1}), Error);
    CHECK_THROWS_AS(RecurrentOperator::cyclic_shift(8, 1.5), Error);
  }

  TEST_CASE("operator csv round trip") {
    for (auto kind : kAllKinds) {
      const auto w = make_recurrent(kind, 12, 0.9, 4);
      std::stringstream ss;
      w.write_csv(ss);
      const auto back = RecurrentOperator::read_csv(ss);
      CHECK((back.dense() - w.dense()).norm() < 1e-12);
      CHECK(back.lambda() == doctest::Approx(0.9));
    }
  }

  TEST_CASE("codebook normalization gives unit self similarity") {
    for (auto family : {CodeFamily::hdc, CodeFamily::hrr, CodeFamily::fhrr, CodeFamily::mbat}) {
      CAPTURE(to_string(family));
      CodebookSpec spec{family, 8192, 6, 0.0, 11};
      const auto cb = Codebook::generate(spec);
      for (int d = 0; d < 6; ++d)
        CHECK(cb.column(d).squaredNorm() / cb.normalization() == doctest::Approx(1.0).epsilon(0.05));
      CHECK(std::abs(cb.column(0).dot(cb.column(1))) / cb.normalization() < 0.06);
    }
  }

  TEST_CASE("sparse codes keep the expected fraction") {
    CodebookSpec spec{CodeFamily::hdc, 20000, 2, 0.3, 1};
    const auto cb = Codebook::generate(spec);
    const double kept = cb.column(0).squaredNorm() / 20000;
    CHECK(kept == doctest::Approx(0.7).epsilon(0.02));
    CHECK(cb.moments().mean_sq == doctest::Approx(0.7));
  }

  TEST_CASE("codebooks are deterministic per seed") {
    CodebookSpec spec{CodeFamily::hrr, 64, 5, 0.0, 42};
    CHECK(Codebook::generate(spec).data() == Codebook::generate(spec).data());
    spec.seed = 43;
    CHECK(Codebook::generate(spec).data() != Codebook::generate(CodebookSpec{CodeFamily::hrr, 64, 5, 0.0, 42}).data());
  }

  TEST_CASE("codebook csv round trip") {
    const auto cb = Codebook::generate({CodeFamily::fhrr, 10, 3, 0.0, 2});
    std::stringstream ss;
    cb.write_csv(ss);
    const auto back = Codebook::read_csv(ss);
    CHECK((back.data() - cb.data()).norm() < 1e-12);
  }

  TEST_CASE("invalid codebook specs") {
    CHECK_THROWS_AS(Codebook::generate({CodeFamily::hdc, 0, 3, 0.0, 0}), Error);
    CHECK_THROWS_AS(Codebook::generate({CodeFamily::hdc, 8, 3, 1.0, 0}), Error);
    CHECK_THROWS_AS(Codebook::generate({CodeFamily::fhrr, 7, 3, 0.0, 0}), Error);
  }

  TEST_CASE("circular convolution matches the direct sum") {
    const auto u = gaussian(13, 3), v = gaussian(13, 4);
    Eigen::VectorXd direct = Eigen::VectorXd::Zero(13);
    for (int i = 0; i < 13; ++i)
      for (int j = 0; j < 13; ++j) direct[i] += u[j] * v[((i - j) % 13 + 13) % 13];
    CHECK((circular_convolution(u, v) - direct).norm() < 1e-10);
  }

  TEST_CASE("binding inverses") {
    const auto cb = Codebook::generate({CodeFamily::hdc, 256, 2, 0.0, 5});
    const Eigen::VectorXd a = cb.column(0), b = cb.column(1);
    CHECK(bind(bind(a, b, BindMode::hadamard), b, BindMode::hadamard) == a);

    const auto ph = Codebook::generate({CodeFamily::fhrr, 256, 2, 0.0, 5});
    Eigen::VectorXd u = ph.column(0), v = ph.column(1), conj = v;
    conj.tail(128) *= -1.0;
    const auto back = bind(bind(u, v, BindMode::elementwise_complex), conj, BindMode::elementwise_complex);
    CHECK((back - u).norm() < 1e-10);
    CHECK_THROWS_AS(bind(Eigen::VectorXd::Ones(3), Eigen::VectorXd::Ones(3), BindMode::elementwise_complex),
                    Error);
  }

  TEST_CASE("n-gram encoding") {
    const auto cb = Codebook::generate({CodeFamily::hdc, 64, 27, 0.0, 6});
    const auto rho = RecurrentOperator::cyclic_shift(64);
    const int abc[] = {0, 1, 2};
    const Eigen::VectorXd expect = rho.apply_orthogonal(cb.column(0), 2)
                                       .cwiseProduct(rho.apply_orthogonal(cb.column(1), 1))
                                       .cwiseProduct(cb.column(2));
    CHECK(encode_ngram(abc, cb, rho) == expect);
    const int single[] = {4};
    CHECK(encode_ngram(single, cb, rho) == Eigen::VectorXd(cb.column(4)));
  }

  TEST_CASE("seed derivation separates streams") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(make_rng(9, 3)() == make_rng(9, 3)());
  }
}
