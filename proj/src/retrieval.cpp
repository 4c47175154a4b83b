#include "mtp/retrieval.hpp"

#include <algorithm>

#include "mtp/errors.hpp"

namespace mtp {

RetrievalRanking rank_memory(const std::string& instruction, const Memory& memory,
                             const EmbeddingProvider& embedder) {
  RetrievalRanking ranking;
  ranking.query_instruction = instruction;
  if (memory.empty()) return ranking;

  const EmbeddingVector query = embedder.embed(instruction);  // embedded once
  ranking.entries.reserve(memory.size());
  for (std::size_t i = 0; i < memory.size(); ++i) {
    const double score = cosine_similarity(query, embedder.embed(memory.logs[i].instruction));
    ranking.entries.push_back({i, score});
  }
  // stable sort keeps ascending memory_index among equal scores
  std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                   [](const RankedEntry& a, const RankedEntry& b) { return a.score > b.score; });
  return ranking;
}

const SuccessLog& retrieve_ith(const RetrievalRanking& ranking, const Memory& memory,
                               std::size_t i) {
  if (i >= ranking.entries.size()) throw IndexOutOfRangeError(i, ranking.entries.size());
  return memory.logs.at(ranking.entries[i].memory_index);
}

}  // namespace mtp
