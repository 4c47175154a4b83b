#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <string>

#include "mtp/embedding.hpp"
#include "mtp/errors.hpp"

using namespace mtp;

namespace {

// Independent oracle: exact character-3-gram multisets (no hashing, no
// bucketing) with per-word boundary padding, compared by multiset cosine.
std::map<std::string, int> gram_multiset(const std::string& text) {
  std::map<std::string, int> grams;
  std::string word;
  auto flush = [&] {
    if (word.empty()) return;
    std::string padded = " " + word + " ";
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) ++grams[padded.substr(i, 3)];
    word.clear();
  };
  for (char c : text) {
    if (c == ' ' || c == '\t') {
      flush();
    } else {
      word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  flush();
  return grams;
}

double oracle_cosine(const std::string& a, const std::string& b) {
  auto ga = gram_multiset(a);
  auto gb = gram_multiset(b);
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [g, c] : ga) {
    na += static_cast<double>(c) * c;
    auto it = gb.find(g);
    if (it != gb.end()) dot += static_cast<double>(c) * it->second;
  }
  for (const auto& [g, c] : gb) nb += static_cast<double>(c) * c;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

TEST_CASE("lexical similarity ordering matches the exact n-gram oracle") {
  // The oracle establishes the expected ordering before the hashed embedder
  // is trusted with it: the two drawer instructions share the grams of
  // "the" and "drawer" (9 grams) while the button instruction shares only
  // "the" (3 grams).
  const std::string open_drawer = "open the drawer";
  const std::string close_drawer = "close the drawer";
  const std::string press_button = "press the red button";
  const double oracle_near = oracle_cosine(open_drawer, close_drawer);
  const double oracle_far = oracle_cosine(open_drawer, press_button);
  REQUIRE(oracle_near > oracle_far);

  HashedNgramEmbedder embedder;
  const double near = cosine_similarity(embedder.embed(open_drawer), embedder.embed(close_drawer));
  const double far = cosine_similarity(embedder.embed(open_drawer), embedder.embed(press_button));
  CHECK(near > far);
}

TEST_CASE("same text embeds to a bitwise-identical unit vector") {
  HashedNgramEmbedder embedder;
  const std::string text = "leave the pan open.";
  EmbeddingVector a = embedder.embed(text);
  EmbeddingVector b = embedder.embed(text);
  REQUIRE(a.values.size() == 256);
  CHECK(a.values == b.values);  // element-wise exact
  CHECK(std::abs(a.norm() - 1.0) <= 1e-9);
  CHECK(cosine_similarity(a, b) == doctest::Approx(1.0).epsilon(1e-12));

  // case and surrounding spacing do not matter
  EmbeddingVector c = embedder.embed("  Leave The PAN Open.  ");
  CHECK(a.values == c.values);
}

TEST_CASE("a handful of diverse texts all come out unit-norm") {
  HashedNgramEmbedder embedder;
  for (const std::string s : {"a", "ab", "chuck way any rubbish on the table rubbish.",
                              "x y z", "grasp the saucepan_lid", "12345 67890"}) {
    CHECK(std::abs(embedder.embed(s).norm() - 1.0) <= 1e-9);
  }
}

TEST_CASE("embedding empty or blank text is an error") {
  HashedNgramEmbedder embedder;
  CHECK_THROWS_AS(embedder.embed(""), EmptyTextError);
  CHECK_THROWS_AS(embedder.embed("   \t  "), EmptyTextError);
}

TEST_CASE("cosine similarity on hand-computed vectors") {
  EmbeddingVector e1{{1.0, 0.0, 0.0}};
  EmbeddingVector e2{{0.0, 1.0, 0.0}};
  EmbeddingVector diag{{1.0, 1.0, 0.0}};
  EmbeddingVector zero{{0.0, 0.0, 0.0}};

  CHECK(cosine_similarity(e1, e1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cosine_similarity(e1, e2) == doctest::Approx(0.0).epsilon(1e-12));
  // (1,1,0)·(1,0,0) / (√2·1) = 1/√2
  CHECK(cosine_similarity(diag, e1) == doctest::Approx(0.7071067811865475).epsilon(1e-12));
  CHECK(cosine_similarity(e1, zero) == 0.0);
  CHECK(cosine_similarity(zero, zero) == 0.0);

  EmbeddingVector anti{{-1.0, 0.0, 0.0}};
  CHECK(cosine_similarity(e1, anti) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(cosine_similarity(e1, anti) >= -1.0);  // clamped

  EmbeddingVector shorter{{1.0, 0.0}};
  CHECK_THROWS_AS(cosine_similarity(e1, shorter), DimensionMismatchError);
}

TEST_CASE("cosine is symmetric on random embedded pairs") {
  HashedNgramEmbedder embedder;
  const std::vector<std::string> corpus = {
      "open the drawer",       "close the drawer", "press the red button",
      "grasp the saucepan",    "move to the bin",  "rotate the gripper to the left",
      "put the block in the tray"};
  for (const auto& a : corpus) {
    for (const auto& b : corpus) {
      double ab = cosine_similarity(embedder.embed(a), embedder.embed(b));
      double ba = cosine_similarity(embedder.embed(b), embedder.embed(a));
      CHECK(std::abs(ab - ba) <= 1e-12);
      CHECK(ab <= 1.0);
      CHECK(ab >= -1.0);
    }
  }
}
