#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qhmm {

/// Ordered set of output symbols. The position of a symbol is its index in
/// every symbol-labelled container of a model.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> symbols);

  /// Alphabet {"0", "1", ..., "n-1"}.
  static Alphabet numeric(std::size_t n);

  std::size_t size() const noexcept { return symbols_.size(); }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }
  const std::string& symbol(std::size_t index) const { return symbols_.at(index); }

  std::optional<std::size_t> find(std::string_view symbol) const;
  /// Like find() but throws DomainError for unknown symbols.
  std::size_t index_of(std::string_view symbol) const;

  /// True when every symbol is a single character, so words can be written
  /// without separators.
  bool single_char() const noexcept;

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  std::vector<std::string> symbols_;
};

/// A finite output sequence, stored as symbol indices.
using Word = std::vector<std::size_t>;

/// Parses "0110" (single-character alphabets) or "a,b,b" (general form).
Word parse_word(const Alphabet& alphabet, std::string_view text);

/// Inverse of parse_word. The empty word renders as "".
std::string format_word(const Alphabet& alphabet, const Word& word);

}  // namespace qhmm
