#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "vsamem/codebook.hpp"
#include "vsamem/recurrent.hpp"

namespace vsamem {

inline constexpr int kTextAlphabet = 27;  // a–z and space

/// Lowercases letters and maps every other character to space.
std::string normalize_text(std::string_view raw);
/// a..z → 0..25, space → 26. Input must be normalized.
std::vector<int> text_tokens(std::string_view normalized);
std::string read_text_file(const std::string& path);

/// Deterministic pseudo-English: Zipf-distributed words over a random vocabulary.
std::string synthetic_text(long chars, std::uint64_t seed);

struct NgramMemory {
  int n = 0;
  Eigen::VectorXd state;      // Σ over positions of encode_ngram
  std::vector<long> counts;   // exact counts, index Σ t_i·27^{n−1−i}
  long total = 0;
};

long ngram_index(std::span<const int> gram);

/// Superposes every n-gram of the text into one state (identity recurrence).
NgramMemory ingest_ngrams(std::string_view text, int n, const Codebook& codebook,
                          const RecurrentOperator& rho);

/// similarity / (N·E_Φ(x²)ⁿ): the estimated count of one n-gram.
double ngram_count_estimate(const NgramMemory& memory, std::span<const int> gram,
                            const Codebook& codebook, const RecurrentOperator& rho);

}  // namespace vsamem
