#include "vsamem/ngram.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "vsamem/error.hpp"
#include "vsamem/rng.hpp"
#include "vsamem/vsa.hpp"

namespace vsamem {

std::string normalize_text(std::string_view raw) {
  std::string out(raw.size(), ' ');
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const char c = raw[i];
    if (c >= 'a' && c <= 'z') out[i] = c;
    else if (c >= 'A' && c <= 'Z') out[i] = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::vector<int> text_tokens(std::string_view normalized) {
  std::vector<int> out;
  out.reserve(normalized.size());
  for (char c : normalized) {
    if (c == ' ') out.push_back(26);
    else {
      require(c >= 'a' && c <= 'z', ErrorKind::InvalidSpec, "text is not normalized");
      out.push_back(c - 'a');
    }
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::ConfigError, "cannot read text file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string synthetic_text(long chars, std::uint64_t seed) {
  require(chars >= 0, ErrorKind::InvalidSpec, "text length must be >= 0");
  Rng rng = make_rng(seed, 0x74657874);
  // Letter frequencies of English text, a..z.
  static const double freq[26] = {8.2, 1.5, 2.8, 4.3, 12.7, 2.2, 2.0, 6.1, 7.0, 0.15, 0.77, 4.0, 2.4,
                                  6.7, 7.5, 1.9, 0.095, 6.0, 6.3, 9.1, 2.8, 0.98, 2.4, 0.15, 2.0, 0.074};
  std::discrete_distribution<int> letter(std::begin(freq), std::end(freq));
  std::geometric_distribution<int> extra(0.3);
  std::vector<std::string> vocab(2000);
  for (auto& w : vocab) {
    const int len = 1 + std::min(extra(rng), 11);
    for (int i = 0; i < len; ++i) w.push_back(static_cast<char>('a' + letter(rng)));
  }
  std::vector<double> zipf(vocab.size());
  for (std::size_t i = 0; i < zipf.size(); ++i) zipf[i] = 1.0 / static_cast<double>(i + 1);
  std::discrete_distribution<std::size_t> word(zipf.begin(), zipf.end());
  std::string out;
  out.reserve(chars + 16);
  while (static_cast<long>(out.size()) < chars) {
    if (!out.empty()) out.push_back(' ');
    out += vocab[word(rng)];
  }
  out.resize(chars);
  return out;
}

long ngram_index(std::span<const int> gram) {
  long idx = 0;
  for (int t : gram) idx = idx * kTextAlphabet + t;
  return idx;
}

NgramMemory ingest_ngrams(std::string_view text, int n, const Codebook& codebook,
                          const RecurrentOperator& rho) {
  require(n >= 1 && n <= 4, ErrorKind::InvalidSpec, "n-gram order must lie in 1..4");
  require(codebook.alphabet() == kTextAlphabet, ErrorKind::DimensionMismatch,
          "n-gram codebook needs D = 27");
  const std::vector<int> tokens = text_tokens(normalize_text(text));
  require(static_cast<long>(tokens.size()) >= n, ErrorKind::InvalidSpec,
          "text is empty or shorter than one n-gram");
  NgramMemory mem;
  mem.n = n;
  mem.state = Eigen::VectorXd::Zero(codebook.neurons());
  mem.counts.assign(static_cast<std::size_t>(std::pow(kTextAlphabet, n)), 0);
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    const std::span<const int> gram(tokens.data() + i, n);
    ++mem.counts[ngram_index(gram)];
    ++mem.total;
  }
  // Each distinct n-gram is encoded once and added with its multiplicity.
  std::vector<int> gram(n);
  for (std::size_t idx = 0; idx < mem.counts.size(); ++idx) {
    if (mem.counts[idx] == 0) continue;
    long rest = static_cast<long>(idx);
    for (int j = n - 1; j >= 0; --j) {
      gram[j] = static_cast<int>(rest % kTextAlphabet);
      rest /= kTextAlphabet;
    }
    mem.state += static_cast<double>(mem.counts[idx]) * encode_ngram(gram, codebook, rho);
  }
  return mem;
}

double ngram_count_estimate(const NgramMemory& memory, std::span<const int> gram,
                            const Codebook& codebook, const RecurrentOperator& rho) {
  require(static_cast<int>(gram.size()) == memory.n, ErrorKind::DimensionMismatch,
          "n-gram order differs from the memory");
  const double c = codebook.neurons() * std::pow(codebook.moments().mean_sq, memory.n);
  return similarity(memory.state, encode_ngram(gram, codebook, rho), codebook.family()) / c;
}

}  // namespace vsamem
