#include "vsamem/readout.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "vsamem/error.hpp"

namespace vsamem {

Eigen::VectorXd vsa_linear_readout(const Eigen::VectorXd& x, const Codebook& codebook,
                                   const RecurrentOperator& w, long K) {
  require(x.size() == codebook.neurons() && w.neurons() == codebook.neurons(),
          ErrorKind::DimensionMismatch, "state, codebook and recurrence differ in N");
  require(K >= 0, ErrorKind::DomainError, "lookback must be >= 0");
  const Eigen::VectorXd y = w.apply_orthogonal(x, -K);
  return codebook.data().transpose() * y / codebook.normalization();
}

int classify_wta(std::span<const double> h) {
  require(!h.empty(), ErrorKind::DimensionMismatch, "WTA needs D >= 1");
  int best = 0;
  for (int d = 1; d < static_cast<int>(h.size()); ++d)
    if (h[d] > h[best]) best = d;
  return best;
}

int classify_wta(const Eigen::VectorXd& h) {
  return classify_wta(std::span<const double>(h.data(), h.size()));
}

void DetectionParams::validate() const {
  require(!std::isnan(theta) && !(std::isinf(theta) && theta > 0), ErrorKind::DomainError,
          "detection threshold must be finite or -infinity");
  require(p_symbol > 0.0 && p_symbol <= 1.0, ErrorKind::DomainError,
          "p_symbol must lie in (0, 1]");
}

Detection detect(const Eigen::VectorXd& h, const DetectionParams& params) {
  params.validate();
  const int best = classify_wta(h);
  if (h[best] < params.theta) return {true, -1};
  return {false, best};
}

const char* to_string(ReadoutKind kind) {
  switch (kind) {
    case ReadoutKind::vsa_naive: return "vsa-naive";
    case ReadoutKind::mmse_empirical: return "mmse-empirical";
    case ReadoutKind::mmse_direct: return "mmse-direct";
  }
  return "?";
}

ReadoutKind parse_readout_kind(const std::string& name) {
  for (auto k : {ReadoutKind::vsa_naive, ReadoutKind::mmse_empirical, ReadoutKind::mmse_direct})
    if (name == to_string(k)) return k;
  fail(ErrorKind::InvalidSpec, "unknown readout kind '" + name + "'");
}

ReadoutMatrix naive_readout_matrix(const Codebook& codebook, const RecurrentOperator& w,
                                   double lambda, long K) {
  require(w.neurons() == codebook.neurons(), ErrorKind::DimensionMismatch,
          "recurrence and codebook differ in N");
  require(K >= 0, ErrorKind::DomainError, "lookback must be >= 0");
  ReadoutMatrix r;
  r.kind = ReadoutKind::vsa_naive;
  r.lookback = K;
  r.lambda = lambda;
  r.normalization = codebook.normalization();
  r.v = codebook.data() / r.normalization;
  w.rotate(r.v, K);
  return r;
}

Eigen::VectorXd analog_readout(const Eigen::VectorXd& x, const ReadoutMatrix& readout,
                               double floor) {
  require(x.size() == readout.v.rows(), ErrorKind::DimensionMismatch,
          "state and readout differ in N");
  Eigen::VectorXd a = readout.v.transpose() * x;
  if (readout.kind == ReadoutKind::vsa_naive && readout.lambda != 1.0) {
    const double gain = std::pow(readout.lambda, static_cast<double>(readout.lookback));
    require(gain >= floor, ErrorKind::DomainError,
            "lookback too deep: lambda^K is below the compensation floor");
    a /= gain;
  }
  return a;
}

void ReadoutMatrix::write_csv(std::ostream& out) const {
  char buf[64];
  out << "# vsamem-readout v1\n";
  std::snprintf(buf, sizeof buf, "%.17g", lambda);
  out << "# kind=" << to_string(kind) << " K=" << lookback << " lambda=" << buf;
  std::snprintf(buf, sizeof buf, "%.17g", ridge);
  out << " ridge=" << buf << " R=" << training;
  std::snprintf(buf, sizeof buf, "%.3g", residual);
  out << " residual=" << buf << '\n';
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index d = 0; d < v.cols(); ++d) {
      std::snprintf(buf, sizeof buf, "%.17g", v(i, d));
      out << (d ? "," : "") << buf;
    }
    out << '\n';
  }
}

}  // namespace vsamem
