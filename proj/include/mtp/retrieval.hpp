#pragma once

#include <string>
#include <vector>

#include "mtp/embedding.hpp"
#include "mtp/memory_store.hpp"

namespace mtp {

struct RankedEntry {
  std::size_t memory_index = 0;  // position in the ranked memory's log list
  double score = 0.0;            // cosine similarity to the query instruction
};

// A full descending ranking of one memory against one instruction. Computed
// once and then read by rank; ties break toward earlier insertion.
struct RetrievalRanking {
  std::string query_instruction;
  std::vector<RankedEntry> entries;

  std::size_t size() const { return entries.size(); }
};

// Embeds the instruction and every stored instruction with `embedder`, scores
// by cosine and sorts descending; equal scores keep insertion order.
RetrievalRanking rank_memory(const std::string& instruction, const Memory& memory,
                             const EmbeddingProvider& embedder);

// The log behind the i-th ranked entry. `memory` must be the memory that was
// ranked. Throws IndexOutOfRangeError when i >= ranking size.
const SuccessLog& retrieve_ith(const RetrievalRanking& ranking, const Memory& memory,
                               std::size_t i);

}  // namespace mtp
