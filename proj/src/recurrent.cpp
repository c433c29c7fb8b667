#include "vsamem/recurrent.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "vsamem/error.hpp"
#include "vsamem/rng.hpp"

namespace vsamem {

using cd = std::complex<double>;

struct RecurrentOperator::Impl {
  Storage storage = Storage::permutation;
  int n = 0;
  // permutation
  std::vector<int> sigma;
  std::vector<int> cycle_order;  // elements listed cycle by cycle
  std::vector<int> cycle_start;  // offsets into cycle_order, plus end sentinel
  int shift = -1;                // >= 0 when sigma is a cyclic shift
  std::optional<long> cycle;
  // circulant
  Eigen::VectorXd key;
  Eigen::VectorXd spectrum_phase;  // arg of DFT(key)
  int blocks = 1;
  // dense
  Eigen::MatrixXd q;
  // phasor
  Eigen::VectorXd phases;
};

const char* to_string(RecurrenceKind kind) {
  switch (kind) {
    case RecurrenceKind::identity: return "identity";
    case RecurrenceKind::permutation: return "permutation";
    case RecurrenceKind::random_permutation: return "random-permutation";
    case RecurrenceKind::circulant: return "circulant";
    case RecurrenceKind::circulant_paired: return "circulant-paired";
    case RecurrenceKind::haar: return "haar";
    case RecurrenceKind::phasor: return "phasor";
  }
  return "?";
}

RecurrenceKind parse_recurrence_kind(const std::string& name) {
  for (auto k : {RecurrenceKind::identity, RecurrenceKind::permutation,
                 RecurrenceKind::random_permutation, RecurrenceKind::circulant,
                 RecurrenceKind::circulant_paired, RecurrenceKind::haar,
                 RecurrenceKind::phasor})
    if (name == to_string(k)) return k;
  fail(ErrorKind::InvalidSpec, "unknown recurrence kind '" + name + "'");
}

namespace {

void check_lambda(double lambda) {
  require(lambda > 0.0 && lambda <= 1.0, ErrorKind::InvalidSpec,
          "lambda must lie in (0, 1]");
}

long mod(long a, long m) {
  const long r = a % m;
  return r < 0 ? r + m : r;
}

void index_cycles(RecurrentOperator::Impl& im) {
  const int n = im.n;
  std::vector<char> seen(n, 0);
  im.cycle_order.clear();
  im.cycle_start.clear();
  long lcm = 1;
  bool overflow = false;
  for (int s = 0; s < n; ++s) {
    if (seen[s]) continue;
    im.cycle_start.push_back(static_cast<int>(im.cycle_order.size()));
    long len = 0;
    for (int j = s; !seen[j]; j = im.sigma[j]) {
      seen[j] = 1;
      im.cycle_order.push_back(j);
      ++len;
    }
    if (!overflow) {
      const long g = std::gcd(lcm, len);
      const long f = len / g;
      if (lcm > (1L << 62) / f) overflow = true;
      else lcm *= f;
    }
  }
  im.cycle_start.push_back(n);
  im.cycle = overflow ? std::nullopt : std::optional<long>(lcm);
}

// Destination index of each source j under sigma^power.
std::vector<int> permutation_power(const RecurrentOperator::Impl& im, long power) {
  std::vector<int> dst(im.n);
  for (std::size_t c = 0; c + 1 < im.cycle_start.size(); ++c) {
    const int b = im.cycle_start[c];
    const long len = im.cycle_start[c + 1] - b;
    const long step = mod(power, len);
    for (long t = 0; t < len; ++t)
      dst[im.cycle_order[b + t]] = im.cycle_order[b + (t + step) % len];
  }
  return dst;
}

Eigen::VectorXd spectrum_phase_of(const Eigen::VectorXd& key) {
  Eigen::FFT<double> fft;
  std::vector<double> t(key.data(), key.data() + key.size());
  std::vector<cd> f;
  fft.fwd(f, t);
  Eigen::VectorXd ph(key.size());
  for (Eigen::Index k = 0; k < key.size(); ++k) {
    require(std::abs(std::abs(f[k]) - 1.0) < 1e-8, ErrorKind::InvalidSpec,
            "circulant key spectrum is not unit modulus; W would not be orthogonal");
    ph[k] = std::arg(f[k]);
  }
  return ph;
}

}  // namespace

RecurrentOperator::RecurrentOperator(std::shared_ptr<const Impl> impl, double lambda)
    : impl_(std::move(impl)), lambda_(lambda) {
  check_lambda(lambda);
}

RecurrentOperator RecurrentOperator::from_permutation(std::vector<int> sigma,
                                                      double lambda) {
  const int n = static_cast<int>(sigma.size());
  require(n >= 1, ErrorKind::InvalidSpec, "empty permutation");
  std::vector<char> hit(n, 0);
  for (int s : sigma) {
    require(s >= 0 && s < n && !hit[s], ErrorKind::InvalidSpec,
            "index array is not a permutation");
    hit[s] = 1;
  }
  auto im = std::make_shared<Impl>();
  im->storage = Storage::permutation;
  im->n = n;
  im->sigma = std::move(sigma);
  const int sh = im->sigma[0];
  bool is_shift = true;
  for (int j = 0; j < n && is_shift; ++j) is_shift = im->sigma[j] == (j + sh) % n;
  im->shift = is_shift ? sh : -1;
  index_cycles(*im);
  return RecurrentOperator(std::move(im), lambda);
}

RecurrentOperator RecurrentOperator::identity(int n) { return cyclic_shift(n, 1.0, 0); }

RecurrentOperator RecurrentOperator::cyclic_shift(int n, double lambda, int shift) {
  require(n >= 1, ErrorKind::InvalidSpec, "operator needs N >= 1");
  std::vector<int> sigma(n);
  for (int j = 0; j < n; ++j) sigma[j] = static_cast<int>(mod(long(j) + shift, n));
  return from_permutation(std::move(sigma), lambda);
}

RecurrentOperator RecurrentOperator::random_permutation(int n, double lambda,
                                                        std::uint64_t seed) {
  require(n >= 1, ErrorKind::InvalidSpec, "operator needs N >= 1");
  std::vector<int> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  Rng rng(derive_seed(seed, 0x7065726dULL));
  std::shuffle(sigma.begin(), sigma.end(), rng);
  return from_permutation(std::move(sigma), lambda);
}

RecurrentOperator RecurrentOperator::circulant_from_key(const Eigen::VectorXd& key,
                                                        double lambda, int blocks) {
  require(key.size() >= 1 && blocks >= 1, ErrorKind::InvalidSpec, "empty circulant key");
  auto im = std::make_shared<Impl>();
  im->storage = Storage::circulant;
  im->n = static_cast<int>(key.size()) * blocks;
  im->blocks = blocks;
  im->key = key;
  im->spectrum_phase = spectrum_phase_of(key);
  return RecurrentOperator(std::move(im), lambda);
}

RecurrentOperator RecurrentOperator::circulant(int n, double lambda, std::uint64_t seed,
                                               int blocks) {
  require(blocks >= 1 && n >= blocks && n % blocks == 0, ErrorKind::InvalidSpec,
          "circulant block count must divide N");
  const int len = n / blocks;
  Rng rng(derive_seed(seed, 0x63697263ULL));
  std::bernoulli_distribution coin(0.5);
  // The spectrum is a random Hermitian arrangement of all len-th roots of
  // unity: the key is real, W is orthogonal, W^len = I and tr W^j = 0 for
  // 0 < j < len. Independent uniform phases leave tr W^j of order √len,
  // which biases recall when symbols repeat.
  std::vector<int> roots;
  for (int m = 1; 2 * m < len; ++m) roots.push_back(m);
  std::shuffle(roots.begin(), roots.end(), rng);
  const double unit = 2.0 * std::numbers::pi / len;
  std::vector<cd> f(len);
  f[0] = 1.0;
  for (int k = 1; 2 * k < len; ++k) {
    const int m = roots[k - 1];
    f[k] = std::polar(1.0, (coin(rng) ? m : -m) * unit);
    f[len - k] = std::conj(f[k]);
  }
  if (len % 2 == 0 && len > 1) {
    f[len / 2] = -1.0;
    if (coin(rng)) std::swap(f[0], f[len / 2]);
  }
  Eigen::FFT<double> fft;
  std::vector<double> t;
  fft.inv(t, f);
  Eigen::VectorXd key = Eigen::Map<Eigen::VectorXd>(t.data(), len);
  auto im = std::make_shared<Impl>();
  im->storage = Storage::circulant;
  im->n = n;
  im->blocks = blocks;
  im->key = key;
  im->spectrum_phase.resize(len);
  for (int k = 0; k < len; ++k) im->spectrum_phase[k] = std::arg(f[k]);
  im->cycle = len;
  return RecurrentOperator(std::move(im), lambda);
}

RecurrentOperator RecurrentOperator::haar(int n, double lambda, std::uint64_t seed) {
  require(n >= 1, ErrorKind::InvalidSpec, "operator needs N >= 1");
  Rng rng(derive_seed(seed, 0x68616172ULL));
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = g(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::VectorXd diag = qr.matrixQR().diagonal();
  for (int j = 0; j < n; ++j)
    if (diag[j] < 0) q.col(j) *= -1.0;
  auto im = std::make_shared<Impl>();
  im->storage = Storage::dense;
  im->n = n;
  im->q = std::move(q);
  return RecurrentOperator(std::move(im), lambda);
}

RecurrentOperator RecurrentOperator::from_matrix(const Eigen::MatrixXd& q, double lambda) {
  require(q.rows() == q.cols() && q.rows() >= 1, ErrorKind::InvalidSpec,
          "dense operator must be square");
  const double dev =
      (q.transpose() * q - Eigen::MatrixXd::Identity(q.rows(), q.cols())).cwiseAbs().maxCoeff();
  require(dev < 1e-9, ErrorKind::InvalidSpec, "dense operator is not orthogonal");
  auto im = std::make_shared<Impl>();
  im->storage = Storage::dense;
  im->n = static_cast<int>(q.rows());
  im->q = q;
  return RecurrentOperator(std::move(im), lambda);
}

RecurrentOperator RecurrentOperator::phasor_from_phases(const Eigen::VectorXd& phases,
                                                        double lambda) {
  require(phases.size() >= 1, ErrorKind::InvalidSpec, "empty phase array");
  auto im = std::make_shared<Impl>();
  im->storage = Storage::phasor;
  im->n = static_cast<int>(2 * phases.size());
  im->phases = phases;
  return RecurrentOperator(std::move(im), lambda);
}

RecurrentOperator RecurrentOperator::phasor(int n, double lambda, std::uint64_t seed) {
  require(n >= 2 && n % 2 == 0, ErrorKind::InvalidSpec, "phasor operator needs even N");
  Rng rng(derive_seed(seed, 0x70686173ULL));
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  Eigen::VectorXd ph(n / 2);
  for (auto& p : ph) p = u(rng);
  return phasor_from_phases(ph, lambda);
}

RecurrentOperator::Storage RecurrentOperator::storage() const { return impl_->storage; }
int RecurrentOperator::neurons() const { return impl_->n; }
std::optional<long> RecurrentOperator::cycle_length() const { return impl_->cycle; }

RecurrentOperator RecurrentOperator::with_lambda(double lambda) const {
  return RecurrentOperator(impl_, lambda);
}

void RecurrentOperator::rotate(Eigen::Ref<Eigen::MatrixXd> block, long power) const {
  const Impl& im = *impl_;
  require(block.rows() == im.n, ErrorKind::DimensionMismatch,
          "operator applied to a vector of the wrong length");
  if (power == 0 || block.cols() == 0) return;
  switch (im.storage) {
    case Storage::permutation: {
      if (im.shift >= 0) {
        const long k = mod(power * static_cast<long>(im.shift), im.n);
        if (k == 0) return;
        Eigen::VectorXd tmp(im.n);
        for (Eigen::Index c = 0; c < block.cols(); ++c) {
          // out[i] = in[i - k]
          tmp.tail(im.n - k) = block.col(c).head(im.n - k);
          tmp.head(k) = block.col(c).tail(k);
          block.col(c) = tmp;
        }
        return;
      }
      const std::vector<int> dst = permutation_power(im, power);
      Eigen::VectorXd tmp(im.n);
      for (Eigen::Index c = 0; c < block.cols(); ++c) {
        for (int j = 0; j < im.n; ++j) tmp[dst[j]] = block(j, c);
        block.col(c) = tmp;
      }
      return;
    }
    case Storage::circulant: {
      const int len = static_cast<int>(im.key.size());
      std::vector<cd> mult(len);
      for (int k = 0; k < len; ++k)
        mult[k] = std::polar(1.0, static_cast<double>(power) * im.spectrum_phase[k]);
      Eigen::FFT<double> fft;
      std::vector<double> t(len);
      std::vector<cd> f;
      for (Eigen::Index c = 0; c < block.cols(); ++c) {
        for (int b = 0; b < im.blocks; ++b) {
          auto seg = block.col(c).segment(static_cast<Eigen::Index>(b) * len, len);
          for (int i = 0; i < len; ++i) t[i] = seg[i];
          fft.fwd(f, t);
          for (int k = 0; k < len; ++k) f[k] *= mult[k];
          fft.inv(t, f);
          for (int i = 0; i < len; ++i) seg[i] = t[i];
        }
      }
      return;
    }
    case Storage::dense: {
      Eigen::MatrixXd tmp(block.rows(), block.cols());
      const long steps = power < 0 ? -power : power;
      for (long s = 0; s < steps; ++s) {
        if (power > 0) tmp.noalias() = im.q * block;
        else tmp.noalias() = im.q.transpose() * block;
        block = tmp;
      }
      return;
    }
    case Storage::phasor: {
      const int h = im.n / 2;
      for (int i = 0; i < h; ++i) {
        const double a = static_cast<double>(power) * im.phases[i];
        const double cs = std::cos(a), sn = std::sin(a);
        for (Eigen::Index c = 0; c < block.cols(); ++c) {
          const double re = block(i, c), imv = block(i + h, c);
          block(i, c) = cs * re - sn * imv;
          block(i + h, c) = sn * re + cs * imv;
        }
      }
      return;
    }
  }
}

Eigen::VectorXd RecurrentOperator::apply_orthogonal(const Eigen::VectorXd& v,
                                                    long power) const {
  Eigen::VectorXd out = v;
  rotate(out, power);
  return out;
}

Eigen::VectorXd RecurrentOperator::apply(const Eigen::VectorXd& v, long power) const {
  Eigen::VectorXd out = apply_orthogonal(v, power);
  if (lambda_ != 1.0) out *= std::pow(lambda_, static_cast<double>(power));
  return out;
}

Eigen::MatrixXd RecurrentOperator::dense() const {
  if (impl_->storage == Storage::dense) return impl_->q;
  Eigen::MatrixXd w = Eigen::MatrixXd::Identity(impl_->n, impl_->n);
  rotate(w, 1);
  return w;
}

void RecurrentOperator::write_csv(std::ostream& out) const {
  const Impl& im = *impl_;
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  static const char* names[] = {"permutation", "circulant", "dense", "phasor"};
  out << "# vsamem-operator v1\n";
  out << "# storage=" << names[static_cast<int>(im.storage)] << " N=" << im.n
      << " lambda=" << num(lambda_) << " blocks=" << im.blocks << '\n';
  switch (im.storage) {
    case Storage::permutation:
      for (int j = 0; j < im.n; ++j) out << (j ? "," : "") << im.sigma[j];
      out << '\n';
      break;
    case Storage::circulant:
      for (Eigen::Index j = 0; j < im.key.size(); ++j) out << (j ? "," : "") << num(im.key[j]);
      out << '\n';
      break;
    case Storage::phasor:
      for (Eigen::Index j = 0; j < im.phases.size(); ++j)
        out << (j ? "," : "") << num(im.phases[j]);
      out << '\n';
      break;
    case Storage::dense:
      for (int i = 0; i < im.n; ++i) {
        for (int j = 0; j < im.n; ++j) out << (j ? "," : "") << num(im.q(i, j));
        out << '\n';
      }
      break;
  }
}

namespace {
std::vector<double> parse_row(const std::string& line) {
  std::vector<double> v;
  std::istringstream rs(line);
  std::string tok;
  while (std::getline(rs, tok, ',')) v.push_back(std::stod(tok));
  return v;
}
}  // namespace

RecurrentOperator RecurrentOperator::read_csv(std::istream& in) {
  std::string line;
  require(std::getline(in, line) && line == "# vsamem-operator v1", ErrorKind::InvalidSpec,
          "not a v1 operator dump");
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::InvalidSpec,
          "truncated operator header");
  std::string storage;
  int n = 0, blocks = 1;
  double lambda = 1.0;
  {
    std::istringstream hs(line.substr(1));
    std::string tok;
    while (hs >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
      if (key == "storage") storage = val;
      else if (key == "N") n = std::stoi(val);
      else if (key == "lambda") lambda = std::stod(val);
      else if (key == "blocks") blocks = std::stoi(val);
    }
  }
  require(n >= 1, ErrorKind::InvalidSpec, "bad operator size");
  if (storage == "dense") {
    Eigen::MatrixXd q(n, n);
    for (int i = 0; i < n; ++i) {
      require(static_cast<bool>(std::getline(in, line)), ErrorKind::InvalidSpec,
              "truncated dense operator");
      const auto row = parse_row(line);
      require(static_cast<int>(row.size()) == n, ErrorKind::InvalidSpec, "short row");
      for (int j = 0; j < n; ++j) q(i, j) = row[j];
    }
    return from_matrix(q, lambda);
  }
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::InvalidSpec,
          "truncated operator body");
  const auto row = parse_row(line);
  if (storage == "permutation") {
    std::vector<int> sigma(row.begin(), row.end());
    require(static_cast<int>(sigma.size()) == n, ErrorKind::InvalidSpec, "short permutation");
    return from_permutation(std::move(sigma), lambda);
  }
  const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(row.data(), row.size());
  if (storage == "circulant") return circulant_from_key(v, lambda, blocks);
  if (storage == "phasor") return phasor_from_phases(v, lambda);
  fail(ErrorKind::InvalidSpec, "unknown operator storage '" + storage + "'");
}

RecurrentOperator make_recurrent(RecurrenceKind kind, int n, double lambda,
                                 std::uint64_t seed) {
  check_lambda(lambda);
  switch (kind) {
    case RecurrenceKind::identity: return RecurrentOperator::identity(n).with_lambda(lambda);
    case RecurrenceKind::permutation: return RecurrentOperator::cyclic_shift(n, lambda);
    case RecurrenceKind::random_permutation:
      return RecurrentOperator::random_permutation(n, lambda, seed);
    case RecurrenceKind::circulant: return RecurrentOperator::circulant(n, lambda, seed);
    case RecurrenceKind::circulant_paired:
      require(n % 2 == 0, ErrorKind::InvalidSpec, "paired circulant needs even N");
      return RecurrentOperator::circulant(n, lambda, seed, 2);
    case RecurrenceKind::haar: return RecurrentOperator::haar(n, lambda, seed);
    case RecurrenceKind::phasor: return RecurrentOperator::phasor(n, lambda, seed);
  }
  fail(ErrorKind::InvalidSpec, "unknown recurrence kind");
}

}  // namespace vsamem
