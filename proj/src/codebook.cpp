#include "vsamem/codebook.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "vsamem/error.hpp"
#include "vsamem/rng.hpp"

namespace vsamem {

const char* to_string(CodeFamily family) {
  switch (family) {
    case CodeFamily::hdc: return "hdc";
    case CodeFamily::hrr: return "hrr";
    case CodeFamily::fhrr: return "fhrr";
    case CodeFamily::mbat: return "mbat";
  }
  return "?";
}

CodeFamily parse_code_family(const std::string& name) {
  if (name == "hdc") return CodeFamily::hdc;
  if (name == "hrr") return CodeFamily::hrr;
  if (name == "fhrr") return CodeFamily::fhrr;
  if (name == "mbat") return CodeFamily::mbat;
  fail(ErrorKind::InvalidSpec, "unknown code family '" + name + "'");
}

void CodebookSpec::validate() const {
  require(neurons >= 2, ErrorKind::InvalidSpec, "codebook needs N >= 2");
  require(alphabet >= 1, ErrorKind::InvalidSpec, "codebook needs D >= 1");
  require(family != CodeFamily::fhrr || neurons % 2 == 0, ErrorKind::InvalidSpec,
          "FHRR codebook needs even N");
  require(sparseness >= 0.0 && sparseness < 1.0, ErrorKind::InvalidSpec,
          "sparseness factor must lie in [0, 1)");
}

CodeMoments analytic_moments(CodeFamily family, int neurons, double sf) {
  const double keep = 1.0 - sf;
  CodeMoments m;
  switch (family) {
    case CodeFamily::hdc:
      m.mean_sq = keep;
      m.var_sq = keep - keep * keep;
      break;
    case CodeFamily::hrr:
    case CodeFamily::mbat: {
      const double v = 1.0 / neurons;
      m.mean_sq = keep * v;
      m.var_sq = 3.0 * keep * v * v - m.mean_sq * m.mean_sq;
      break;
    }
    case CodeFamily::fhrr:
      m.mean_sq = 0.5 * keep;
      m.var_sq = 0.375 * keep - m.mean_sq * m.mean_sq;
      break;
  }
  m.var = m.mean_sq;
  if (family == CodeFamily::fhrr) {
    // Pair self term |φ|² is Bernoulli(keep); one pair crosstalk term has
    // variance keep²/2.
    m.self_ratio = 2.0 * sf / keep;
  } else {
    m.self_ratio = m.var_sq / (m.var * m.var);
  }
  return m;
}

namespace {

void fill_column(Eigen::MatrixXd& data, int d, const CodebookSpec& spec, Rng& rng) {
  const int n = spec.neurons;
  std::bernoulli_distribution zero(spec.sparseness);
  switch (spec.family) {
    case CodeFamily::hdc: {
      std::bernoulli_distribution coin(0.5);
      for (int i = 0; i < n; ++i) data(i, d) = coin(rng) ? 1.0 : -1.0;
      break;
    }
    case CodeFamily::hrr:
    case CodeFamily::mbat: {
      std::normal_distribution<double> g(0.0, 1.0 / std::sqrt(double(n)));
      for (int i = 0; i < n; ++i) data(i, d) = g(rng);
      break;
    }
    case CodeFamily::fhrr: {
      std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
      const int h = n / 2;
      for (int i = 0; i < h; ++i) {
        const double phi = u(rng);
        data(i, d) = std::cos(phi);
        data(i + h, d) = std::sin(phi);
      }
      break;
    }
  }
  if (spec.sparseness <= 0.0) return;
  if (spec.family == CodeFamily::fhrr) {
    const int h = n / 2;
    for (int i = 0; i < h; ++i)
      if (zero(rng)) data(i, d) = data(i + h, d) = 0.0;
  } else {
    for (int i = 0; i < n; ++i)
      if (zero(rng)) data(i, d) = 0.0;
  }
}

}  // namespace

Codebook Codebook::generate(const CodebookSpec& spec) {
  spec.validate();
  Codebook cb;
  cb.spec_ = spec;
  cb.moments_ = analytic_moments(spec.family, spec.neurons, spec.sparseness);
  cb.data_.resize(spec.neurons, spec.alphabet);
  Rng rng(derive_seed(spec.seed, 0x636f6465626f6f6bULL));
  constexpr int kMaxRedraws = 10000;
  for (int d = 0; d < spec.alphabet; ++d) {
    int attempts = 0;
    do {
      require(attempts++ < kMaxRedraws, ErrorKind::InvalidSpec,
              "sparseness too high: columns keep coming out all-zero");
      fill_column(cb.data_, d, spec, rng);
    } while (cb.data_.col(d).isZero(0.0));
  }
  return cb;
}

Codebook Codebook::from_matrix(Eigen::MatrixXd data, CodeFamily family,
                               const CodeMoments& moments) {
  require(data.rows() >= 1 && data.cols() >= 1, ErrorKind::InvalidSpec,
          "codebook matrix must be non-empty");
  Codebook cb;
  cb.spec_.family = family;
  cb.spec_.neurons = static_cast<int>(data.rows());
  cb.spec_.alphabet = static_cast<int>(data.cols());
  cb.moments_ = moments;
  cb.data_ = std::move(data);
  return cb;
}

void Codebook::write_csv(std::ostream& out) const {
  const auto& m = moments_;
  out << "# vsamem-codebook v1\n";
  out << "# family=" << to_string(spec_.family) << " N=" << neurons()
      << " D=" << alphabet() << " sf=" << spec_.sparseness << " seed=" << spec_.seed
      << '\n';
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", m.mean);
  out << "# moments=" << buf;
  for (double v : {m.mean_sq, m.var, m.var_sq, m.self_ratio}) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << ',' << buf;
  }
  out << '\n';
  for (int i = 0; i < neurons(); ++i) {
    for (int d = 0; d < alphabet(); ++d) {
      std::snprintf(buf, sizeof buf, "%.17g", data_(i, d));
      out << (d ? "," : "") << buf;
    }
    out << '\n';
  }
}

Codebook Codebook::read_csv(std::istream& in) {
  std::string line;
  require(std::getline(in, line) && line == "# vsamem-codebook v1",
          ErrorKind::InvalidSpec, "not a v1 codebook dump");
  Codebook cb;
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::InvalidSpec,
          "truncated codebook header");
  {
    std::istringstream hs(line.substr(1));
    std::string tok;
    while (hs >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
      if (key == "family") cb.spec_.family = parse_code_family(val);
      else if (key == "N") cb.spec_.neurons = std::stoi(val);
      else if (key == "D") cb.spec_.alphabet = std::stoi(val);
      else if (key == "sf") cb.spec_.sparseness = std::stod(val);
      else if (key == "seed") cb.spec_.seed = std::stoull(val);
    }
  }
  require(std::getline(in, line) && line.rfind("# moments=", 0) == 0,
          ErrorKind::InvalidSpec, "missing codebook moments");
  {
    std::istringstream ms(line.substr(10));
    double* fields[] = {&cb.moments_.mean, &cb.moments_.mean_sq, &cb.moments_.var,
                        &cb.moments_.var_sq, &cb.moments_.self_ratio};
    std::string tok;
    for (double* f : fields) {
      require(static_cast<bool>(std::getline(ms, tok, ',')), ErrorKind::InvalidSpec,
              "short moments line");
      *f = std::stod(tok);
    }
  }
  const int n = cb.spec_.neurons, dd = cb.spec_.alphabet;
  require(n >= 1 && dd >= 1, ErrorKind::InvalidSpec, "bad codebook dimensions");
  cb.data_.resize(n, dd);
  for (int i = 0; i < n; ++i) {
    require(static_cast<bool>(std::getline(in, line)), ErrorKind::InvalidSpec,
            "truncated codebook body");
    std::istringstream rs(line);
    std::string tok;
    for (int d = 0; d < dd; ++d) {
      require(static_cast<bool>(std::getline(rs, tok, ',')), ErrorKind::InvalidSpec,
              "short codebook row");
      cb.data_(i, d) = std::stod(tok);
    }
  }
  return cb;
}

}  // namespace vsamem
