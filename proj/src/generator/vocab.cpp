#include "humo/generator/vocab.hpp"

#include <cctype>
#include <set>

#include "humo/core/error.hpp"

namespace humo {

std::vector<std::string> split_words(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || ch == '\'') {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

WordVocab WordVocab::build(const std::vector<std::string>& texts) {
  std::set<std::string> seen;
  for (const std::string& t : texts)
    for (std::string& w : split_words(t)) seen.insert(std::move(w));
  WordVocab v;
  for (const std::string& w : seen) {
    v.index_[w] = static_cast<int>(v.words_.size());
    v.words_.push_back(w);
  }
  return v;
}

int WordVocab::id(const std::string& word) const {
  const auto it = index_.find(word);
  return it == index_.end() ? kUnk : it->second;
}

Json WordVocab::to_json() const { return Json(words_); }

WordVocab WordVocab::from_json(const Json& j) {
  WordVocab v;
  const auto words = j.get<std::vector<std::string>>();
  if (words.empty() || words.front() != "<unk>") throw ValidationError("word vocab: first entry must be <unk>");
  for (std::size_t i = 1; i < words.size(); ++i) {
    if (!v.index_.emplace(words[i], static_cast<int>(i)).second) throw ValidationError("word vocab: duplicate word " + words[i]);
    v.words_.push_back(words[i]);
  }
  return v;
}

std::vector<int> text_tokenize(const std::string& text, const WordVocab& vocab) {
  std::vector<int> ids;
  for (const std::string& w : split_words(text)) ids.push_back(vocab.id(w));
  return ids;
}

std::vector<std::uint8_t> build_prefix_mask(std::size_t n_text, std::size_t n_motion) {
  const std::size_t n = n_text + n_motion;
  std::vector<std::uint8_t> allowed(n * n, 0);
  for (std::size_t q = 0; q < n; ++q)
    for (std::size_t k = 0; k < n; ++k) allowed[q * n + k] = (k < n_text || (q >= n_text && k <= q)) ? 1 : 0;
  return allowed;
}

}  // namespace humo
