#include "navkit/tokenize.hpp"

namespace navkit {

namespace {

inline bool is_token_char(unsigned char c, TokenPattern p) {
  if (c >= 0x80) return true;
  if (c >= 'a' && c <= 'z') return true;
  if (c >= 'A' && c <= 'Z') return true;
  if (c >= '0' && c <= '9') return p == TokenPattern::Alnum;
  return false;
}

inline char lower(unsigned char c) {
  if (c >= 'A' && c <= 'Z') return static_cast<char>(c - 'A' + 'a');
  return static_cast<char>(c);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, TokenPattern pattern) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (is_token_char(c, pattern)) {
      cur.push_back(lower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string lowercase_ascii(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (unsigned char c : text) out.push_back(lower(c));
  return out;
}

namespace {

bool is_ws(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_ws(s[b])) ++b;
  while (e > b && is_ws(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> raw;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if ((c == '.' || c == '!' || c == '?') && (i + 1 == text.size() || is_ws(text[i + 1]))) {
      std::string s = trim(text.substr(begin, i + 1 - begin));
      if (!s.empty()) raw.push_back(std::move(s));
      begin = i + 1;
    }
  }
  if (begin < text.size()) {
    std::string s = trim(text.substr(begin));
    if (!s.empty()) raw.push_back(std::move(s));
  }

  // merge short fragments (< 3 tokens) forward, a trailing one backward
  std::vector<std::string> out;
  std::string pending;
  for (std::string& s : raw) {
    if (!pending.empty()) {
      s = pending + " " + s;
      pending.clear();
    }
    if (tokenize(s).size() < 3) {
      pending = std::move(s);
    } else {
      out.push_back(std::move(s));
    }
  }
  if (!pending.empty()) {
    if (out.empty()) {
      out.push_back(std::move(pending));
    } else {
      out.back() += " " + pending;
    }
  }
  return out;
}

}  // namespace navkit
