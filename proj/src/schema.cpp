#include "lexpath/schema.hpp"

#include <algorithm>
#include <deque>
#include <tuple>

#include "lexpath/error.hpp"

namespace lexpath {

BlockKind kind_of(const Block& block) noexcept {
  return std::holds_alternative<CriterionBlock>(block) ? BlockKind::kCriterion
                                                       : BlockKind::kConclusion;
}

const BlockId& id_of(const Block& block) noexcept {
  return std::visit([](const auto& b) -> const BlockId& { return b.id; }, block);
}

const Block* Schema::find(std::string_view block_id) const {
  auto it = blocks.find(BlockId(block_id));
  return it == blocks.end() ? nullptr : &it->second;
}

const CriterionBlock* Schema::criterion(std::string_view block_id) const {
  const Block* b = find(block_id);
  return b ? std::get_if<CriterionBlock>(b) : nullptr;
}

const ConclusionBlock* Schema::conclusion(std::string_view block_id) const {
  const Block* b = find(block_id);
  return b ? std::get_if<ConclusionBlock>(b) : nullptr;
}

std::vector<BlockId> successors(const Block& block) {
  std::vector<BlockId> out;
  if (const auto* c = std::get_if<CriterionBlock>(&block)) {
    for (const auto& a : c->answers) {
      if (a.next) out.push_back(*a.next);
    }
  } else {
    out = std::get<ConclusionBlock>(block).exits;
  }
  return out;
}

bool ValidationReport::has_error(std::string_view code) const {
  return std::any_of(errors.begin(), errors.end(),
                     [&](const Finding& f) { return f.code == code; });
}

bool ValidationReport::has_warning(std::string_view code) const {
  return std::any_of(warnings.begin(), warnings.end(),
                     [&](const Finding& f) { return f.code == code; });
}

namespace {

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
  });
}

Finding make(std::string_view code, const BlockId& id, std::string message) {
  return Finding{std::string(code), id, std::move(message)};
}

void check_texts(const Block& block, std::vector<Finding>& errors) {
  if (const auto* c = std::get_if<CriterionBlock>(&block)) {
    if (blank(c->title)) errors.push_back(make(codes::kEmptyText, c->id, "criterion title is empty"));
    for (const auto& a : c->answers) {
      if (blank(a.label)) {
        errors.push_back(make(codes::kEmptyText, c->id, "answer '" + a.id + "' has an empty label"));
      }
    }
    return;
  }
  const auto& k = std::get<ConclusionBlock>(block);
  if (blank(k.title)) errors.push_back(make(codes::kEmptyText, k.id, "conclusion title is empty"));
  if (blank(k.explanation)) {
    errors.push_back(make(codes::kEmptyText, k.id, "conclusion explanation is empty"));
  }
  for (const auto& step : k.next_steps) {
    if (blank(step.title)) errors.push_back(make(codes::kEmptyText, k.id, "next step title is empty"));
  }
}

// Iterative three-colour DFS over existing blocks; one CYCLE finding per back
// edge, attributed to the block the back edge leaves from.
void find_cycles(const Schema& schema, std::vector<Finding>& errors) {
  enum class Colour { kWhite, kGrey, kBlack };
  std::map<BlockId, Colour> colour;
  for (const auto& [id, _] : schema.blocks) colour[id] = Colour::kWhite;

  struct Frame {
    BlockId id;
    std::vector<BlockId> next;
    std::size_t pos = 0;
  };

  for (const auto& [root, _] : schema.blocks) {
    if (colour[root] != Colour::kWhite) continue;
    std::vector<Frame> stack;
    stack.push_back(Frame{root, successors(schema.blocks.at(root))});
    colour[root] = Colour::kGrey;
    while (!stack.empty()) {
      Frame& top = stack.back();
      if (top.pos == top.next.size()) {
        colour[top.id] = Colour::kBlack;
        stack.pop_back();
        continue;
      }
      const BlockId target = top.next[top.pos++];
      auto it = colour.find(target);
      if (it == colour.end()) continue;  // dangling, reported elsewhere
      if (it->second == Colour::kGrey) {
        errors.push_back(make(codes::kCycle, top.id, "edge to '" + target + "' closes a cycle"));
      } else if (it->second == Colour::kWhite) {
        it->second = Colour::kGrey;
        stack.push_back(Frame{target, successors(schema.blocks.at(target))});
      }
    }
  }
}

std::set<BlockId> reach_from_start(const Schema& schema) {
  std::set<BlockId> seen{schema.start};
  std::deque<BlockId> queue{schema.start};
  while (!queue.empty()) {
    const BlockId id = queue.front();
    queue.pop_front();
    for (const auto& next : successors(schema.blocks.at(id))) {
      if (!schema.blocks.count(next)) continue;
      if (seen.insert(next).second) queue.push_back(next);
    }
  }
  return seen;
}

}  // namespace

ValidationReport validate_schema(const Schema& schema) {
  ValidationReport report;
  auto& errors = report.errors;
  auto& warnings = report.warnings;

  const bool has_start = schema.blocks.count(schema.start) > 0;
  if (!has_start) {
    errors.push_back(make(codes::kNoStart, schema.start, "start block does not exist"));
  }

  for (const auto& [id, block] : schema.blocks) {
    check_texts(block, errors);

    for (const auto& target : successors(block)) {
      if (!schema.blocks.count(target)) {
        errors.push_back(make(codes::kDanglingEdge, id, "edge to unknown block '" + target + "'"));
      }
    }

    if (const auto* c = std::get_if<CriterionBlock>(&block)) {
      if (c->answers.empty()) {
        errors.push_back(make(codes::kNoAnswers, id, "criterion block has no answers"));
      } else if (c->answers.size() == 1) {
        warnings.push_back(make(codes::kSingleAnswer, id, "criterion block has a single answer"));
      }
      std::set<std::string> labels;
      std::set<std::string> answer_ids;
      for (const auto& a : c->answers) {
        if (!labels.insert(a.label).second) {
          errors.push_back(make(codes::kDuplicateLabel, id, "duplicate answer label '" + a.label + "'"));
        }
        if (!answer_ids.insert(a.id).second) {
          errors.push_back(make(codes::kDuplicateAnswerId, id, "duplicate answer id '" + a.id + "'"));
        }
      }
    } else {
      const auto& k = std::get<ConclusionBlock>(block);
      if (k.exits.size() > 1) {
        errors.push_back(make(codes::kBadConclusionFanout, id,
                              "conclusion block has " + std::to_string(k.exits.size()) +
                                  " outgoing edges"));
      }
    }
  }

  find_cycles(schema, errors);

  if (has_start) {
    const auto seen = reach_from_start(schema);
    for (const auto& [id, _] : schema.blocks) {
      if (!seen.count(id)) {
        warnings.push_back(make(codes::kUnreachable, id, "block is not reachable from start"));
      }
    }
  }

  auto order = [](const Finding& a, const Finding& b) {
    return std::tie(a.code, a.block_id, a.message) < std::tie(b.code, b.block_id, b.message);
  };
  std::sort(errors.begin(), errors.end(), order);
  std::sort(warnings.begin(), warnings.end(), order);
  return report;
}

std::set<BlockId> reachable_blocks(const Schema& schema) {
  if (!schema.blocks.count(schema.start)) {
    throw Error(ErrorCode::kNoStart, "start block '" + schema.start + "' does not exist");
  }
  return reach_from_start(schema);
}

Target next_block(const Schema& schema, std::string_view at,
                  const std::optional<std::string>& chosen) {
  const Block* block = schema.find(at);
  if (!block) throw Error(ErrorCode::kUnknownBlock, "unknown block '" + std::string(at) + "'");

  if (const auto* c = std::get_if<CriterionBlock>(block)) {
    if (!chosen) {
      throw Error(ErrorCode::kWrongBlockKind,
                  "criterion block '" + c->id + "' requires an answer");
    }
    for (const auto& a : c->answers) {
      if (a.id == *chosen) return a.next;
    }
    throw Error(ErrorCode::kUnknownAnswer,
                "answer '" + *chosen + "' does not belong to block '" + c->id + "'");
  }

  const auto& k = std::get<ConclusionBlock>(*block);
  if (chosen) {
    throw Error(ErrorCode::kWrongBlockKind,
                "conclusion block '" + k.id + "' does not take an answer");
  }
  return k.next();
}

}  // namespace lexpath
