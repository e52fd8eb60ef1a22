#include "selectkit/text.hpp"

#include <cctype>

namespace selectkit {

namespace {

bool is_space(unsigned char c) { return std::isspace(c) != 0; }

bool is_word_byte(unsigned char c) { return c >= 0x80 || std::isalnum(c) != 0; }

char lower_byte(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 ? static_cast<char>(std::tolower(u)) : c;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = lower_byte(c);
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string normalize_name(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (is_space(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(lower_byte(c));
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : text) {
    if (is_word_byte(static_cast<unsigned char>(c))) {
      cur.push_back(lower_byte(c));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

std::vector<std::size_t> find_word_occurrences(std::string_view haystack,
                                               std::string_view needle) {
  std::vector<std::size_t> hits;
  if (needle.empty() || needle.size() > haystack.size()) return hits;
  const std::string h = to_lower(haystack);
  const std::string n = to_lower(needle);
  std::size_t pos = h.find(n);
  while (pos != std::string::npos) {
    const bool left_ok = pos == 0 || !is_word_byte(static_cast<unsigned char>(h[pos - 1]));
    const std::size_t end = pos + n.size();
    const bool right_ok = end == h.size() || !is_word_byte(static_cast<unsigned char>(h[end]));
    if (left_ok && right_ok) {
      hits.push_back(pos);
      pos = h.find(n, end);
    } else {
      pos = h.find(n, pos + 1);
    }
  }
  return hits;
}

bool contains_word(std::string_view haystack, std::string_view needle) {
  return !find_word_occurrences(haystack, needle).empty();
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  if (from.empty()) return s;
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

std::size_t count_occurrences(std::string_view s, std::string_view needle) {
  if (needle.empty()) return 0;
  std::size_t n = 0;
  for (std::size_t pos = s.find(needle); pos != std::string_view::npos;
       pos = s.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

}  // namespace selectkit
