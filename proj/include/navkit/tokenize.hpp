#pragma once
// Shared tokenizer: lowercased alphanumeric runs. The embedders, the BM25
// index, TF-IDF ranking and the fuzzy matcher all tokenize identically.

#include <string>
#include <string_view>
#include <vector>

namespace navkit {

// Token characters are [a-z0-9] (ASCII letters lowercased) plus any byte
// >= 0x80, so UTF-8 words survive as tokens. "alpha" drops digits.
enum class TokenPattern { Alnum, Alpha };

std::vector<std::string> tokenize(std::string_view text,
                                  TokenPattern pattern = TokenPattern::Alnum);

std::string lowercase_ascii(std::string_view text);

// Sentence segmentation: split after '.', '!' or '?' followed by whitespace
// (or end of text); sentences under 3 tokens merge into the following
// sentence, a trailing short sentence merges backward. Text without any
// terminator is a single sentence. Returns trimmed sentences.
std::vector<std::string> split_sentences(std::string_view text);

}  // namespace navkit
