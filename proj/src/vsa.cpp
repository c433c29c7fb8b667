#include "vsamem/vsa.hpp"

#include <complex>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "vsamem/error.hpp"

namespace vsamem {

Eigen::VectorXd circular_convolution(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  require(u.size() == v.size() && u.size() > 0, ErrorKind::DimensionMismatch,
          "convolution operands differ in length");
  const auto n = u.size();
  Eigen::FFT<double> fft;
  std::vector<double> a(u.data(), u.data() + n), b(v.data(), v.data() + n);
  std::vector<std::complex<double>> fa, fb;
  fft.fwd(fa, a);
  fft.fwd(fb, b);
  for (Eigen::Index k = 0; k < n; ++k) fa[k] *= fb[k];
  fft.inv(a, fa);
  return Eigen::Map<Eigen::VectorXd>(a.data(), n);
}

Eigen::VectorXd bind(const Eigen::VectorXd& u, const Eigen::VectorXd& v, BindMode mode) {
  require(u.size() == v.size(), ErrorKind::DimensionMismatch,
          "bind operands differ in length");
  switch (mode) {
    case BindMode::hadamard: return u.cwiseProduct(v);
    case BindMode::circular_convolution: return circular_convolution(u, v);
    case BindMode::elementwise_complex: {
      require(u.size() % 2 == 0, ErrorKind::DimensionMismatch,
              "complex binding needs an even-length [real; imag] layout");
      const auto h = u.size() / 2;
      Eigen::VectorXd out(u.size());
      out.head(h) = u.head(h).cwiseProduct(v.head(h)) - u.tail(h).cwiseProduct(v.tail(h));
      out.tail(h) = u.head(h).cwiseProduct(v.tail(h)) + u.tail(h).cwiseProduct(v.head(h));
      return out;
    }
  }
  fail(ErrorKind::InvalidSpec, "unknown bind mode");
}

double similarity(const Eigen::VectorXd& u, const Eigen::VectorXd& v, CodeFamily family) {
  require(u.size() == v.size(), ErrorKind::DimensionMismatch,
          "similarity operands differ in length");
  require(family != CodeFamily::fhrr || u.size() % 2 == 0, ErrorKind::DimensionMismatch,
          "FHRR similarity needs an even-length layout");
  // Re(Σ conj(u_k) v_k) over pairs equals the plain dot product of the layout.
  return u.dot(v);
}

Eigen::VectorXd encode_ngram(std::span<const int> tokens, const Codebook& codebook,
                             const RecurrentOperator& rho) {
  require(!tokens.empty(), ErrorKind::InvalidSpec, "n-gram needs at least one token");
  require(rho.neurons() == codebook.neurons(), ErrorKind::DimensionMismatch,
          "permutation and codebook differ in N");
  const long len = static_cast<long>(tokens.size());
  Eigen::VectorXd out = Eigen::VectorXd::Ones(codebook.neurons());
  for (long t = 0; t < len; ++t) {
    const int tok = tokens[t];
    require(tok >= 0 && tok < codebook.alphabet(), ErrorKind::DimensionMismatch,
            "n-gram token out of codebook range");
    out = out.cwiseProduct(rho.apply_orthogonal(codebook.column(tok), len - 1 - t));
  }
  return out;
}

}  // namespace vsamem
