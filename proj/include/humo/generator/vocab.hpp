#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "humo/core/json_io.hpp"

namespace humo {

/// Motion ids occupy [0, K); BOS, EOS and PAD follow.
struct MotionVocab {
  std::size_t codebook_size = 0;

  int bos() const { return static_cast<int>(codebook_size); }
  int eos() const { return static_cast<int>(codebook_size) + 1; }
  int pad() const { return static_cast<int>(codebook_size) + 2; }
  std::size_t size() const { return codebook_size + 3; }
  bool is_motion(int id) const { return id >= 0 && static_cast<std::size_t>(id) < codebook_size; }
};

/// Lowercased words split on anything that is not a letter, digit or apostrophe.
std::vector<std::string> split_words(const std::string& text);

/// Word table built from a corpus; id 0 is UNK, the rest follow sorted word order.
class WordVocab {
 public:
  WordVocab() : words_{"<unk>"} {}
  static WordVocab build(const std::vector<std::string>& texts);

  static constexpr int kUnk = 0;
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  int id(const std::string& word) const;

  Json to_json() const;
  static WordVocab from_json(const Json& j);

 private:
  std::vector<std::string> words_;
  std::map<std::string, int> index_;
};

/// Word ids with UNK for unknown words; the empty string gives an empty list.
std::vector<int> text_tokenize(const std::string& text, const WordVocab& vocab);

/// allowed[q * n + k] for n = n_text + n_motion: every query sees the whole text prefix;
/// motion queries also see motion keys up to themselves.
std::vector<std::uint8_t> build_prefix_mask(std::size_t n_text, std::size_t n_motion);

}  // namespace humo
