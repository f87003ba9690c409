#include "chromaprobe/prompt_bank.hpp"

#include <fstream>
#include <sstream>

#include "chromaprobe/errors.hpp"
#include "text_util.hpp"

namespace chromaprobe {

namespace {
constexpr std::string_view kSlot = "{}";
}

PromptTemplate::PromptTemplate(std::string id, std::string text, std::string experiment)
    : id_(std::move(id)), text_(std::move(text)), experiment_(std::move(experiment)) {
  const auto first = text_.find(kSlot);
  if (first == std::string::npos) {
    throw InputError("prompt_bank: template '" + text_ + "' has no {} slot");
  }
  if (text_.find(kSlot, first + kSlot.size()) != std::string::npos) {
    throw InputError("prompt_bank: template '" + text_ + "' has more than one {} slot");
  }
  slot_ = first;
}

std::string PromptTemplate::instantiate(std::string_view label) const {
  std::string out;
  out.reserve(text_.size() + label.size());
  out.append(text_, 0, slot_);
  out.append(label);
  out.append(text_, slot_ + kSlot.size());
  return out;
}

std::span<const PromptTemplate> builtin_templates() {
  static const std::vector<PromptTemplate> templates = {
      {"bare", "{}", "shapes,stroop"},
      {"object", "The color of the object is {}", "shapes"},
      {"background", "The color of the background is {}", "shapes,stroop"},
      {"word-font", "The word is written in {} font", "stroop"},
      {"text-says", "The text says {}", "stroop"},
      {"favorite-word", "My favorite word, written in the color {}", "stroop"},
  };
  return templates;
}

std::string instantiate(const PromptTemplate& tmpl, ColorId label, const Palette& palette) {
  return tmpl.instantiate(palette.name(label));
}

std::string instantiate(const PromptTemplate& tmpl, std::string_view label, const Palette& palette) {
  const auto id = palette.find(label);
  if (!id) throw InputError("prompt_bank: unknown label '" + std::string(label) + "'");
  return instantiate(tmpl, *id, palette);
}

PerColor<std::string> instantiate_all(const PromptTemplate& tmpl, const Palette& palette) {
  PerColor<std::string> out;
  for (auto id : kAllColorIds) out[index_of(id)] = instantiate(tmpl, id, palette);
  return out;
}

std::vector<PromptTemplate> parse_template_file(std::string_view text) {
  std::vector<PromptTemplate> out;
  for (auto line : detail::split_lines(text)) {
    line = detail::trim(line);
    if (line.empty()) continue;
    out.emplace_back("custom-" + std::to_string(out.size() + 1), std::string(line), "custom");
  }
  return out;
}

std::vector<PromptTemplate> load_template_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("prompt_bank: cannot open template file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_template_file(ss.str());
}

const PromptTemplate& find_template(std::span<const PromptTemplate> candidates, std::string_view id) {
  std::string known;
  for (const auto& t : candidates) {
    if (t.id() == id) return t;
    known += (known.empty() ? "" : ", ") + t.id();
  }
  throw InputError("prompt_bank: unknown template id '" + std::string(id) + "' (known: " + known + ")");
}

}  // namespace chromaprobe
