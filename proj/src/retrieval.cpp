#include "lexpath/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <random>
#include <unordered_map>

#include "lexpath/error.hpp"
#include "lexpath/text.hpp"

namespace lexpath {

namespace {

std::uint64_t fnv1a(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t mix(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  const std::size_t n = std::min(a.size(), b.size());
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

// Byte offsets of each code point start, plus the end offset.
std::vector<std::size_t> code_point_bounds(std::string_view s) {
  std::vector<std::size_t> bounds;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) bounds.push_back(i);
  }
  bounds.push_back(s.size());
  return bounds;
}

}  // namespace

double cosine(std::span<const double> a, std::span<const double> b) noexcept {
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

HashedNgramEncoder::HashedNgramEncoder(std::size_t dims, std::uint64_t seed)
    : dims_(dims), seed_(seed) {
  if (dims_ == 0) throw Error(ErrorCode::kBadArgument, "encoder dimensionality must be positive");
}

SentenceVector HashedNgramEncoder::encode(std::string_view input) const {
  const std::string norm = text::normalize(input);
  if (norm.empty()) throw Error(ErrorCode::kEmptyText, "text is empty after normalization");

  const std::string padded = " " + norm + " ";
  const auto bounds = code_point_bounds(padded);
  const std::size_t chars = bounds.size() - 1;

  std::map<std::string_view, int> counts;
  const std::string_view view(padded);
  for (std::size_t n = kMinGram; n <= kMaxGram; ++n) {
    for (std::size_t i = 0; i + n <= chars; ++i) {
      ++counts[view.substr(bounds[i], bounds[i + n] - bounds[i])];
    }
  }

  SentenceVector v{std::vector<double>(dims_, 0.0)};
  for (const auto& [gram, count] : counts) {
    const std::uint64_t h = mix(fnv1a(gram) ^ seed_);
    const double weight = 1.0 + std::log(static_cast<double>(count));
    v.values[h % dims_] += (h >> 63) ? -weight : weight;
  }
  const double norm2 = std::sqrt(dot(v.values, v.values));
  if (norm2 > 0.0) {
    for (auto& x : v.values) x /= norm2;
  }
  return v;
}

SentenceVector embed(std::string_view text) {
  static const HashedNgramEncoder encoder;
  return encoder.encode(text);
}

RetrievalIndex RetrievalIndex::build(const std::vector<CorpusCase>& corpus, AnnParams params,
                                     std::shared_ptr<const SentenceEncoder> encoder) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "corpus holds no case");
  if (params.m < 2) throw Error(ErrorCode::kBadArgument, "neighbour count must be at least 2");

  RetrievalIndex index;
  index.encoder_ = encoder ? std::move(encoder) : std::make_shared<HashedNgramEncoder>();
  index.params_ = params;
  index.case_count_ = corpus.size();

  for (const auto& c : corpus) {
    std::size_t ordinal = 0;
    for (const auto& sentence : c.sentences) {
      const std::size_t this_ordinal = ordinal++;
      if (text::normalize(sentence).empty()) continue;
      index.entries_.push_back(
          Entry{c.case_id, this_ordinal, sentence, index.encoder_->encode(sentence)});
    }
  }

  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double level_mult = 1.0 / std::log(static_cast<double>(params.m));
  index.nodes_.resize(index.entries_.size());
  for (std::uint32_t id = 0; id < index.entries_.size(); ++id) {
    const double u = 1.0 - unit(rng);  // (0, 1]
    const auto level = static_cast<std::size_t>(std::floor(-std::log(u) * level_mult));
    index.insert(id, level);
  }
  return index;
}

double RetrievalIndex::distance(std::uint32_t a, std::span<const double> q) const noexcept {
  return 1.0 - dot(entries_[a].vector.values, q);
}

std::vector<std::pair<double, std::uint32_t>> RetrievalIndex::search_layer(
    std::span<const double> q, std::uint32_t entry, std::size_t ef, std::size_t layer) const {
  using Item = std::pair<double, std::uint32_t>;
  std::vector<bool> visited(entries_.size(), false);
  std::priority_queue<Item, std::vector<Item>, std::greater<>> frontier;  // nearest first
  std::priority_queue<Item> best;                                         // farthest first

  const double d0 = distance(entry, q);
  frontier.emplace(d0, entry);
  best.emplace(d0, entry);
  visited[entry] = true;

  while (!frontier.empty()) {
    const auto [d, id] = frontier.top();
    if (d > best.top().first && best.size() >= ef) break;
    frontier.pop();
    const auto& links = nodes_[id].links;
    if (layer >= links.size()) continue;
    for (std::uint32_t n : links[layer]) {
      if (visited[n]) continue;
      visited[n] = true;
      const double dn = distance(n, q);
      if (best.size() < ef || dn < best.top().first) {
        frontier.emplace(dn, n);
        best.emplace(dn, n);
        if (best.size() > ef) best.pop();
      }
    }
  }

  std::vector<Item> out;
  out.reserve(best.size());
  while (!best.empty()) {
    out.push_back(best.top());
    best.pop();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

// Diversity heuristic: keep a candidate only if it is closer to the base
// point than to every neighbour already kept; pad with the pruned ones.
std::vector<std::uint32_t> RetrievalIndex::select_neighbours(
    std::vector<std::pair<double, std::uint32_t>> cands, std::size_t m) const {
  std::sort(cands.begin(), cands.end());
  std::vector<std::uint32_t> kept;
  std::vector<std::uint32_t> pruned;
  for (const auto& [d, id] : cands) {
    if (kept.size() >= m) break;
    bool diverse = true;
    for (std::uint32_t k : kept) {
      if (distance(id, entries_[k].vector.values) < d) {
        diverse = false;
        break;
      }
    }
    (diverse ? kept : pruned).push_back(id);
  }
  for (std::size_t i = 0; kept.size() < m && i < pruned.size(); ++i) kept.push_back(pruned[i]);
  return kept;
}

void RetrievalIndex::insert(std::uint32_t id, std::size_t level) {
  nodes_[id].links.assign(level + 1, {});
  if (id == 0) {
    entry_point_ = 0;
    top_level_ = level;
    return;
  }
  const auto& q = entries_[id].vector.values;
  std::uint32_t cur = entry_point_;
  for (std::size_t l = top_level_; l > level; --l) {
    cur = search_layer(q, cur, 1, l).front().second;
  }
  for (std::size_t l = std::min(level, top_level_) + 1; l-- > 0;) {
    auto cands = search_layer(q, cur, params_.ef_construction, l);
    const std::size_t cap = l == 0 ? 2 * params_.m : params_.m;
    nodes_[id].links[l] = select_neighbours(cands, params_.m);
    for (std::uint32_t n : nodes_[id].links[l]) {
      auto& back = nodes_[n].links[l];
      back.push_back(id);
      if (back.size() > cap) {
        std::vector<std::pair<double, std::uint32_t>> scored;
        scored.reserve(back.size());
        for (std::uint32_t b : back) scored.emplace_back(distance(b, entries_[n].vector.values), b);
        back = select_neighbours(std::move(scored), cap);
      }
    }
    cur = cands.front().second;
  }
  if (level > top_level_) {
    top_level_ = level;
    entry_point_ = id;
  }
}

std::vector<std::pair<double, std::uint32_t>> RetrievalIndex::ann_search(std::span<const double> q,
                                                                         std::size_t ef) const {
  std::uint32_t cur = entry_point_;
  for (std::size_t l = top_level_; l > 0; --l) cur = search_layer(q, cur, 1, l).front().second;
  return search_layer(q, cur, ef, 0);
}

SentenceVector RetrievalIndex::encode_query(std::string_view query, std::size_t k) const {
  if (k == 0) throw Error(ErrorCode::kBadArgument, "k must be at least 1");
  if (text::normalize(query).empty()) throw Error(ErrorCode::kEmptyQuery, "query is empty");
  return encoder_->encode(query);
}

namespace {

// Max-over-sentences aggregation, then score descending and case id ascending.
std::vector<Suggestion> rank_cases(const std::vector<RetrievalIndex::Entry>& entries,
                                   const std::vector<std::pair<double, std::uint32_t>>& scored,
                                   std::size_t k) {
  std::unordered_map<std::string_view, std::size_t> slot;
  std::vector<Suggestion> cases;
  std::vector<std::size_t> best_ordinal;
  for (const auto& [score, id] : scored) {
    const auto& e = entries[id];
    auto [it, fresh] = slot.try_emplace(e.case_id, cases.size());
    if (fresh) {
      cases.push_back(Suggestion{e.case_id, e.sentence, score});
      best_ordinal.push_back(e.sentence_ordinal);
      continue;
    }
    auto& s = cases[it->second];
    auto& ord = best_ordinal[it->second];
    if (score > s.score || (score == s.score && e.sentence_ordinal < ord)) {
      s.best_sentence = e.sentence;
      s.score = score;
      ord = e.sentence_ordinal;
    }
  }
  std::sort(cases.begin(), cases.end(), [](const Suggestion& a, const Suggestion& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.case_id < b.case_id;
  });
  if (cases.size() > k) cases.resize(k);
  return cases;
}

}  // namespace

std::vector<Suggestion> RetrievalIndex::suggest_cases(std::string_view query, std::size_t k) const {
  const SentenceVector q = encode_query(query, k);
  if (entries_.empty()) return {};

  std::size_t ef = std::max(params_.ef_search, 3 * k);
  while (true) {
    ef = std::min(ef, entries_.size());
    auto hits = ann_search(q.values, ef);
    std::vector<std::pair<double, std::uint32_t>> scored;
    scored.reserve(hits.size());
    for (const auto& [d, id] : hits) scored.emplace_back(dot(entries_[id].vector.values, q.values), id);
    auto ranked = rank_cases(entries_, scored, k);
    if (ranked.size() >= k || ef >= entries_.size()) return ranked;
    ef *= 2;
  }
}

std::vector<Suggestion> RetrievalIndex::exact_topk(std::string_view query, std::size_t k) const {
  const SentenceVector q = encode_query(query, k);
  std::vector<std::pair<double, std::uint32_t>> scored;
  scored.reserve(entries_.size());
  for (std::uint32_t id = 0; id < entries_.size(); ++id) {
    scored.emplace_back(dot(entries_[id].vector.values, q.values), id);
  }
  return rank_cases(entries_, scored, k);
}

}  // namespace lexpath
