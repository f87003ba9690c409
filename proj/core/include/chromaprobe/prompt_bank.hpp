#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chromaprobe/color_vocab.hpp"

namespace chromaprobe {

/// A text prompt with exactly one `{}` label slot.
class PromptTemplate {
 public:
  /// Throws InputError unless `text` contains exactly one `{}`.
  PromptTemplate(std::string id, std::string text, std::string experiment);

  const std::string& id() const { return id_; }
  const std::string& text() const { return text_; }
  /// Corpora the template is meant for, comma separated.
  const std::string& experiment() const { return experiment_; }

  std::string instantiate(std::string_view label) const;

 private:
  std::string id_;
  std::string text_;
  std::string experiment_;
  std::size_t slot_ = 0;
};

/// The six built-in templates, in a fixed order with stable ids:
/// "bare", "object", "background", "word-font", "text-says", "favorite-word".
std::span<const PromptTemplate> builtin_templates();

/// Replaces the slot with the palette spelling of `label`.
std::string instantiate(const PromptTemplate& tmpl, ColorId label,
                        const Palette& palette = Palette::standard());

/// Checked overload for free-text labels; throws InputError for names
/// outside the vocabulary.
std::string instantiate(const PromptTemplate& tmpl, std::string_view label,
                        const Palette& palette = Palette::standard());

/// All 11 instantiations in vocabulary order.
PerColor<std::string> instantiate_all(const PromptTemplate& tmpl,
                                      const Palette& palette = Palette::standard());

/// One template per non-blank line; ids are "custom-1", "custom-2", ...
std::vector<PromptTemplate> parse_template_file(std::string_view text);
std::vector<PromptTemplate> load_template_file(const std::filesystem::path& path);

/// Finds a template by id among `candidates`; throws InputError listing
/// the known ids when absent.
const PromptTemplate& find_template(std::span<const PromptTemplate> candidates, std::string_view id);

}  // namespace chromaprobe
