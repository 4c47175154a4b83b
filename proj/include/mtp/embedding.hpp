#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mtp {

struct EmbeddingVector {
  std::vector<double> values;

  std::size_t dimension() const { return values.size(); }
  double norm() const;
};

// cos(a, b) clamped to [-1, 1]; 0 when either vector has zero norm.
// Throws DimensionMismatchError when lengths differ.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string name() const = 0;
  virtual std::size_t dimension() const = 0;
  // Throws EmptyTextError when text trims to nothing; ProviderError on
  // remote failure.
  virtual EmbeddingVector embed(const std::string& text) const = 0;
};

struct HashedNgramConfig {
  std::size_t dimension = 256;
  std::size_t ngram = 3;
  std::uint64_t seed = 0x9e3779b97f4a7c15ull;  // fixed so vectors never drift
};

// Offline, deterministic text embedder: lowercases, splits into words, pads
// each word with boundary markers, hashes every character n-gram into one of
// `dimension` signed counters and L2-normalizes the result. Same text in,
// bitwise-identical vector out.
class HashedNgramEmbedder : public EmbeddingProvider {
 public:
  explicit HashedNgramEmbedder(HashedNgramConfig config = {}) : config_(config) {}

  std::string name() const override { return "hashed-ngram"; }
  std::size_t dimension() const override { return config_.dimension; }
  EmbeddingVector embed(const std::string& text) const override;

 private:
  HashedNgramConfig config_;
};

}  // namespace mtp
