#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lexpath {

// L2-normalized sentence embedding (or all zeros when the input produced no
// features).
struct SentenceVector {
  std::vector<double> values;

  std::size_t dims() const noexcept { return values.size(); }
  bool operator==(const SentenceVector&) const = default;
};

double cosine(std::span<const double> a, std::span<const double> b) noexcept;

class SentenceEncoder {
 public:
  virtual ~SentenceEncoder() = default;
  virtual std::size_t dims() const noexcept = 0;
  // Throws Error(kEmptyText) when the text is empty after normalization.
  virtual SentenceVector encode(std::string_view text) const = 0;
};

// Character 3- to 5-grams of the normalized text (space padded), weighted
// 1 + ln(count) and folded into `dims` buckets by a seeded signed hash.
class HashedNgramEncoder final : public SentenceEncoder {
 public:
  static constexpr std::size_t kDefaultDims = 256;
  static constexpr std::uint64_t kDefaultSeed = 0x6c65787061746831ULL;
  static constexpr std::size_t kMinGram = 3;
  static constexpr std::size_t kMaxGram = 5;

  explicit HashedNgramEncoder(std::size_t dims = kDefaultDims, std::uint64_t seed = kDefaultSeed);

  std::size_t dims() const noexcept override { return dims_; }
  std::uint64_t seed() const noexcept { return seed_; }
  SentenceVector encode(std::string_view text) const override;

 private:
  std::size_t dims_;
  std::uint64_t seed_;
};

// Default-encoder embedding.
SentenceVector embed(std::string_view text);

struct CorpusCase {
  std::string case_id;
  std::string citation;
  std::string decision_date;
  std::vector<std::string> sentences;
};

struct AnnParams {
  std::size_t m = 16;
  std::size_t ef_construction = 200;
  std::size_t ef_search = 128;
  std::uint64_t seed = 42;
};

struct Suggestion {
  std::string case_id;
  std::string best_sentence;
  double score = 0.0;

  bool operator==(const Suggestion&) const = default;
};

inline constexpr std::size_t kDefaultSuggestions = 100;

// Immutable sentence index over a case corpus with a navigable small-world
// graph for approximate search and a linear scan for exact search.
class RetrievalIndex {
 public:
  struct Entry {
    std::string case_id;
    std::size_t sentence_ordinal = 0;
    std::string sentence;
    SentenceVector vector;
  };

  // Throws Error(kEmptyCorpus) when the corpus holds no case.
  static RetrievalIndex build(const std::vector<CorpusCase>& corpus, AnnParams params = {},
                              std::shared_ptr<const SentenceEncoder> encoder = nullptr);

  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t case_count() const noexcept { return case_count_; }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  const AnnParams& params() const noexcept { return params_; }
  const SentenceEncoder& encoder() const noexcept { return *encoder_; }

  // Approximate top-k cases by best sentence similarity to the query.
  std::vector<Suggestion> suggest_cases(std::string_view query,
                                        std::size_t k = kDefaultSuggestions) const;
  // Exhaustive-scan ground truth with the same ranking rules.
  std::vector<Suggestion> exact_topk(std::string_view query,
                                     std::size_t k = kDefaultSuggestions) const;

 private:
  struct Node {
    std::vector<std::vector<std::uint32_t>> links;  // one neighbour list per layer
  };

  RetrievalIndex() = default;

  SentenceVector encode_query(std::string_view query, std::size_t k) const;
  double distance(std::uint32_t a, std::span<const double> q) const noexcept;
  std::vector<std::pair<double, std::uint32_t>> search_layer(std::span<const double> q,
                                                             std::uint32_t entry, std::size_t ef,
                                                             std::size_t layer) const;
  std::vector<std::uint32_t> select_neighbours(std::vector<std::pair<double, std::uint32_t>> cands,
                                               std::size_t m) const;
  void insert(std::uint32_t id, std::size_t level);
  std::vector<std::pair<double, std::uint32_t>> ann_search(std::span<const double> q,
                                                           std::size_t ef) const;

  std::shared_ptr<const SentenceEncoder> encoder_;
  AnnParams params_;
  std::vector<Entry> entries_;
  std::size_t case_count_ = 0;
  std::vector<Node> nodes_;
  std::uint32_t entry_point_ = 0;
  std::size_t top_level_ = 0;
};

}  // namespace lexpath
