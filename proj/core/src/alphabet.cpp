#include "qhmm/alphabet.hpp"

#include <algorithm>
#include <set>

#include "qhmm/errors.hpp"

namespace qhmm {

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw DomainError("alphabet must contain at least one symbol");
  std::set<std::string> seen;
  for (const auto& s : symbols_) {
    if (s.empty()) throw DomainError("alphabet symbols must be nonempty");
    if (s.find(',') != std::string::npos) throw DomainError("alphabet symbols may not contain ','");
    if (!seen.insert(s).second) throw DomainError("duplicate alphabet symbol '" + s + "'");
  }
}

Alphabet Alphabet::numeric(std::size_t n) {
  std::vector<std::string> symbols;
  symbols.reserve(n);
  for (std::size_t i = 0; i < n; ++i) symbols.push_back(std::to_string(i));
  return Alphabet(std::move(symbols));
}

std::optional<std::size_t> Alphabet::find(std::string_view symbol) const {
  auto it = std::find(symbols_.begin(), symbols_.end(), symbol);
  if (it == symbols_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - symbols_.begin());
}

std::size_t Alphabet::index_of(std::string_view symbol) const {
  if (auto idx = find(symbol)) return *idx;
  throw DomainError("unknown symbol '" + std::string(symbol) + "'");
}

bool Alphabet::single_char() const noexcept {
  return std::all_of(symbols_.begin(), symbols_.end(),
                     [](const std::string& s) { return s.size() == 1; });
}

Word parse_word(const Alphabet& alphabet, std::string_view text) {
  Word word;
  if (text.empty()) return word;
  if (text.find(',') == std::string_view::npos && alphabet.single_char()) {
    for (char c : text) word.push_back(alphabet.index_of(std::string_view(&c, 1)));
    return word;
  }
  std::size_t start = 0;
  while (true) {
    const auto end = text.find(',', start);
    word.push_back(alphabet.index_of(text.substr(start, end - start)));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return word;
}

std::string format_word(const Alphabet& alphabet, const Word& word) {
  std::string out;
  const bool compact = alphabet.single_char();
  for (std::size_t k = 0; k < word.size(); ++k) {
    if (k > 0 && !compact) out += ',';
    out += alphabet.symbol(word[k]);
  }
  return out;
}

}  // namespace qhmm
