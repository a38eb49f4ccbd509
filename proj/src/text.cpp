#include "lexpath/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>

namespace lexpath::text {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Decodes one code point starting at `i` and advances `i`. Malformed
// sequences decode to U+FFFD and consume one byte.
char32_t decode(std::string_view s, std::size_t& i) {
  const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  const unsigned char b0 = byte(i);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return kReplacement;
  }
  if (i + len > s.size()) {
    ++i;
    return kReplacement;
  }
  for (std::size_t k = 1; k < len; ++k) {
    const unsigned char b = byte(i + k);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return kReplacement;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  i += len;
  return cp;
}

void encode(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Base letters for U+00C0..U+00FF; "" keeps the code point as is.
constexpr std::array<const char*, 64> kLatin1 = {
    "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i", "i", "i",
    "d", "n", "o", "o", "o", "o", "o", "",  "o", "u", "u", "u", "u", "y", "th", "ss",
    "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i", "i", "i",
    "d", "n", "o", "o", "o", "o", "o", "",  "o", "u", "u", "u", "u", "y", "th", "y",
};

struct Range {
  char32_t first;
  char32_t last;
  const char* base;
};

constexpr std::array<Range, 25> kLatinExtA = {{
    {0x100, 0x105, "a"},  {0x106, 0x10D, "c"}, {0x10E, 0x111, "d"}, {0x112, 0x11B, "e"},
    {0x11C, 0x123, "g"},  {0x124, 0x127, "h"}, {0x128, 0x131, "i"}, {0x132, 0x133, "ij"},
    {0x134, 0x135, "j"},  {0x136, 0x138, "k"}, {0x139, 0x142, "l"}, {0x143, 0x14B, "n"},
    {0x14C, 0x151, "o"},  {0x152, 0x153, "oe"}, {0x154, 0x159, "r"}, {0x15A, 0x161, "s"},
    {0x162, 0x167, "t"},  {0x168, 0x173, "u"}, {0x174, 0x175, "w"}, {0x176, 0x178, "y"},
    {0x179, 0x17E, "z"},  {0x17F, 0x17F, "s"}, {0x2018, 0x2019, "'"}, {0x201C, 0x201D, "\""},
    {0x2013, 0x2014, "-"},
}};

bool is_space(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v' ||
         cp == 0xA0 || cp == 0x2009 || cp == 0x202F;
}

bool is_combining(char32_t cp) { return cp >= 0x300 && cp <= 0x36F; }

}  // namespace

std::string normalize(std::string_view utf8) {
  std::string out;
  out.reserve(utf8.size());
  bool pending_space = false;
  auto emit = [&](std::string_view piece) {
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.append(piece);
  };

  std::size_t i = 0;
  while (i < utf8.size()) {
    const char32_t cp = decode(utf8, i);
    if (is_space(cp)) {
      pending_space = true;
      continue;
    }
    if (is_combining(cp)) continue;
    if (cp < 0x80) {
      const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(cp)));
      emit(std::string_view(&c, 1));
      continue;
    }
    if (cp >= 0xC0 && cp <= 0xFF && *kLatin1[cp - 0xC0] != '\0') {
      emit(kLatin1[cp - 0xC0]);
      continue;
    }
    const auto* range = std::find_if(kLatinExtA.begin(), kLatinExtA.end(), [cp](const Range& r) {
      return cp >= r.first && cp <= r.last;
    });
    if (range != kLatinExtA.end()) {
      emit(range->base);
      continue;
    }
    std::string piece;
    encode(cp, piece);
    emit(piece);
  }
  return out;
}

std::vector<std::string> segment_sentences(std::string_view text, std::size_t min_tokens) {
  std::vector<std::string> out;
  auto flush = [&](std::string_view piece) {
    const auto first = piece.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return;
    const auto last = piece.find_last_not_of(" \t\r\n");
    piece = piece.substr(first, last - first + 1);
    std::size_t tokens = 0;
    bool in_token = false;
    for (char c : piece) {
      const bool space = c == ' ' || c == '\t' || c == '\r' || c == '\n';
      if (!space && !in_token) ++tokens;
      in_token = !space;
    }
    if (tokens >= min_tokens) out.emplace_back(piece);
  };

  std::size_t begin = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    const bool at_end = i + 1 == text.size();
    const bool before_space = !at_end && std::isspace(static_cast<unsigned char>(text[i + 1]));
    if (at_end || before_space) {
      flush(text.substr(begin, i + 1 - begin));
      begin = i + 1;
    }
  }
  if (begin < text.size()) flush(text.substr(begin));
  return out;
}

namespace {

constexpr std::array<std::string_view, 12> kAllowedTags = {
    "a", "b", "br", "em", "i", "li", "ol", "p", "strong", "u", "ul", "span"};

bool allowed_tag(std::string_view name) {
  return std::find(kAllowedTags.begin(), kAllowedTags.end(), name) != kAllowedTags.end();
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string unescape_attr(std::string_view v) {
  static constexpr std::array<std::pair<std::string_view, char>, 6> kEntities = {{
      {"&amp;", '&'}, {"&quot;", '"'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&#39;", '\''}, {"&apos;", '\''},
  }};
  std::string out;
  for (std::size_t i = 0; i < v.size();) {
    bool matched = false;
    if (v[i] == '&') {
      for (const auto& [entity, ch] : kEntities) {
        if (v.substr(i, entity.size()) == entity) {
          out.push_back(ch);
          i += entity.size();
          matched = true;
          break;
        }
      }
    }
    if (!matched) out.push_back(v[i++]);
  }
  return out;
}

std::string escape_attr(std::string_view v) {
  std::string out;
  for (char c : v) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

// Extracts the href attribute (quoted or bare) from the inside of a tag.
std::string find_href(std::string_view inside) {
  const std::string low = lower(inside);
  std::size_t pos = 0;
  while ((pos = low.find("href", pos)) != std::string::npos) {
    const bool boundary = pos == 0 || std::isspace(static_cast<unsigned char>(low[pos - 1]));
    std::size_t k = pos + 4;
    while (k < low.size() && std::isspace(static_cast<unsigned char>(low[k]))) ++k;
    if (!boundary || k >= low.size() || low[k] != '=') {
      pos += 4;
      continue;
    }
    ++k;
    while (k < low.size() && std::isspace(static_cast<unsigned char>(low[k]))) ++k;
    if (k >= inside.size()) return {};
    if (inside[k] == '"' || inside[k] == '\'') {
      const char quote = inside[k];
      const auto end = inside.find(quote, k + 1);
      if (end == std::string_view::npos) return {};
      return std::string(inside.substr(k + 1, end - k - 1));
    }
    auto end = k;
    while (end < inside.size() && !std::isspace(static_cast<unsigned char>(inside[end]))) ++end;
    return std::string(inside.substr(k, end - k));
  }
  return {};
}

bool safe_url(std::string_view url) {
  const std::string low = lower(url);
  return low.rfind("http://", 0) == 0 || low.rfind("https://", 0) == 0 ||
         low.rfind("mailto:", 0) == 0;
}

// True when `s` at `i` starts a character reference like &amp; or &#233;.
bool is_entity(std::string_view s, std::size_t i) {
  std::size_t k = i + 1;
  if (k < s.size() && s[k] == '#') {
    ++k;
    if (k < s.size() && (s[k] == 'x' || s[k] == 'X')) ++k;
  }
  const std::size_t body = k;
  while (k < s.size() && std::isalnum(static_cast<unsigned char>(s[k]))) ++k;
  return k > body && k < s.size() && s[k] == ';' && k - body <= 10;
}

}  // namespace

std::string sanitize_html(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    const char c = in[i];
    if (c == '<') {
      std::size_t k = i + 1;
      const bool closing = k < in.size() && in[k] == '/';
      if (closing) ++k;
      const std::size_t name_begin = k;
      while (k < in.size() && std::isalnum(static_cast<unsigned char>(in[k]))) ++k;
      const auto close = in.find('>', k);
      if (k == name_begin || close == std::string_view::npos) {
        out += "&lt;";
        ++i;
        continue;
      }
      const std::string name = lower(in.substr(name_begin, k - name_begin));
      const std::string_view inside = in.substr(k, close - k);
      i = close + 1;
      if (!closing && (name == "script" || name == "style")) {
        const auto end = lower(in.substr(i)).find("</" + name);
        if (end == std::string::npos) {
          i = in.size();
        } else {
          const auto gt = in.find('>', i + end);
          i = gt == std::string_view::npos ? in.size() : gt + 1;
        }
        continue;
      }
      if (!allowed_tag(name)) continue;
      if (closing) {
        if (name != "br") out += "</" + name + ">";
        continue;
      }
      if (name == "a") {
        const std::string href = unescape_attr(find_href(inside));
        out += safe_url(href) ? "<a href=\"" + escape_attr(href) + "\">" : std::string("<a>");
        continue;
      }
      out += "<" + name + ">";
      continue;
    }
    if (c == '>') {
      out += "&gt;";
    } else if (c == '&') {
      out += is_entity(in, i) ? "&" : "&amp;";
    } else {
      out.push_back(c);
    }
    ++i;
  }
  return out;
}

std::string strip_control(std::string_view utf8) {
  std::string out;
  out.reserve(utf8.size());
  std::size_t i = 0;
  while (i < utf8.size()) {
    const char32_t cp = decode(utf8, i);
    const bool c0 = cp < 0x20 && cp != '\t' && cp != '\n';
    const bool c1 = cp >= 0x7F && cp <= 0x9F;
    if (!c0 && !c1) encode(cp, out);
  }
  return out;
}

}  // namespace lexpath::text
