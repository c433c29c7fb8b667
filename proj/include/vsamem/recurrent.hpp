#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vsamem {

/// Construction recipes accepted by make_recurrent.
enum class RecurrenceKind {
  identity,
  permutation,         // cyclic shift by one: a single N-cycle
  random_permutation,  // uniform permutation, cycle length reported
  circulant,           // real circulant whose spectrum is the N-th roots of unity
  circulant_paired,    // block-diagonal [C 0; 0 C] acting on both FHRR halves
  haar,                // dense Haar-distributed orthogonal matrix
  phasor,              // per-pair rotation for the [real; imag] layout
};

const char* to_string(RecurrenceKind kind);
RecurrenceKind parse_recurrence_kind(const std::string& name);

/// Matrix-free orthogonal recurrence W with contraction λ, i.e. the operator λW.
/// Immutable; copies share storage.
class RecurrentOperator {
 public:
  static RecurrentOperator identity(int n);
  static RecurrentOperator cyclic_shift(int n, double lambda = 1.0, int shift = 1);
  /// (Wv)[sigma[j]] = v[j].
  static RecurrentOperator from_permutation(std::vector<int> sigma, double lambda = 1.0);
  static RecurrentOperator random_permutation(int n, double lambda, std::uint64_t seed);
  /// Random real circulant (or `blocks` identical diagonal copies of one) with
  /// cycle length N/blocks.
  static RecurrentOperator circulant(int n, double lambda, std::uint64_t seed, int blocks = 1);
  /// Circulant W_ij = w_{(i-j) mod L}. The key spectrum must be unit modulus.
  static RecurrentOperator circulant_from_key(const Eigen::VectorXd& key, double lambda,
                                              int blocks = 1);
  static RecurrentOperator haar(int n, double lambda, std::uint64_t seed);
  static RecurrentOperator phasor(int n, double lambda, std::uint64_t seed);
  static RecurrentOperator phasor_from_phases(const Eigen::VectorXd& phases, double lambda);
  /// Dense operator; Q must be orthogonal to 1e-9.
  static RecurrentOperator from_matrix(const Eigen::MatrixXd& q, double lambda = 1.0);

  enum class Storage { permutation, circulant, dense, phasor };

  Storage storage() const;
  int neurons() const;
  double lambda() const { return lambda_; }
  RecurrentOperator with_lambda(double lambda) const;
  /// Smallest c > 0 with W^c = I when known exactly (permutations).
  std::optional<long> cycle_length() const;

  /// In place: each column v of `block` becomes W^power v (no λ).
  void rotate(Eigen::Ref<Eigen::MatrixXd> block, long power) const;
  /// (λW)^power v; negative powers are the exact inverse.
  Eigen::VectorXd apply(const Eigen::VectorXd& v, long power) const;
  /// W^power v.
  Eigen::VectorXd apply_orthogonal(const Eigen::VectorXd& v, long power) const;
  /// Materialized W (without λ).
  Eigen::MatrixXd dense() const;

  void write_csv(std::ostream& out) const;
  static RecurrentOperator read_csv(std::istream& in);

  struct Impl;

 private:
  explicit RecurrentOperator(std::shared_ptr<const Impl> impl, double lambda);
  std::shared_ptr<const Impl> impl_;
  double lambda_ = 1.0;
};

RecurrentOperator make_recurrent(RecurrenceKind kind, int n, double lambda,
                                 std::uint64_t seed);

}  // namespace vsamem
