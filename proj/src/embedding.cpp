#include "mtp/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "mtp/errors.hpp"

namespace mtp {
namespace {

// FNV-1a over the gram bytes, offset basis perturbed by the fixed seed.
std::uint64_t hash_gram(const std::string& gram, std::uint64_t seed) {
  std::uint64_t h = 14695981039346656037ull ^ seed;
  for (unsigned char c : gram) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

double EmbeddingVector::norm() const {
  double sum = 0.0;
  for (double v : values) sum += v * v;
  return std::sqrt(sum);
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.values.size() != b.values.size())
    throw DimensionMismatchError(a.values.size(), b.values.size());
  double dot = 0.0;
  // accumulate in index order so results are reproducible
  for (std::size_t i = 0; i < a.values.size(); ++i) dot += a.values[i] * b.values[i];
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

EmbeddingVector HashedNgramEmbedder::embed(const std::string& text) const {
  std::string lowered;
  lowered.reserve(text.size());
  for (unsigned char c : text) lowered.push_back(static_cast<char>(std::tolower(c)));

  std::istringstream in(lowered);
  std::string word;
  std::vector<double> counters(config_.dimension, 0.0);
  bool any_gram = false;
  while (in >> word) {
    // pad with a boundary marker on both sides so "pen|" differs from "pen"
    const std::string padded = " " + word + " ";
    if (padded.size() < config_.ngram) continue;
    for (std::size_t i = 0; i + config_.ngram <= padded.size(); ++i) {
      const std::uint64_t h = hash_gram(padded.substr(i, config_.ngram), config_.seed);
      const std::size_t bucket = h % config_.dimension;
      // an independent high bit decides the sign so buckets stay balanced
      const double sign = (h >> 63) ? 1.0 : -1.0;
      counters[bucket] += sign;
      any_gram = true;
    }
  }
  if (!any_gram) throw EmptyTextError();

  EmbeddingVector vec{std::move(counters)};
  const double n = vec.norm();
  if (n > 0.0) {
    for (double& v : vec.values) v /= n;
  }
  return vec;
}

}  // namespace mtp
