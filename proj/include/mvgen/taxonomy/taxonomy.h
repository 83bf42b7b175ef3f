#pragma once

/// @file taxonomy.h
/// @brief Class-label taxonomy for zero-shot labeling.
///
/// Three scopes: segment-wise labels describe one segment, content-style and
/// visual-style labels describe the whole track. The shipped taxonomy lives in
/// data/taxonomy.json and is also compiled in as the default.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace mvgen {

enum class LabelScope { SegmentWise, ContentStyle, VisualStyle };

std::string_view to_string(LabelScope scope);
/// Accepts "segment_wise", "content_style", "visual_style".
LabelScope label_scope_from_string(std::string_view name);

struct LabelCategory {
  std::string id;
  std::string display_name;  ///< prose used in prompts, e.g. "Tempo range"
  std::vector<std::string> labels;
  LabelScope scope = LabelScope::SegmentWise;
  /// Allows fewer than two labels.
  bool degenerate = false;
};

struct LabelTaxonomy {
  std::string version;
  std::vector<LabelCategory> categories;

  /// Categories of one scope, in file order.
  std::vector<const LabelCategory*> in_scope(LabelScope scope) const;
  const LabelCategory* find(std::string_view id) const;
  /// Throws ConfigInvalid listing every problem: duplicate ids, missing
  /// scopes, empty or duplicate labels, non-degenerate single-label categories.
  void validate() const;
};

/// Parses and validates. Errors: ConfigInvalid.
LabelTaxonomy taxonomy_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const LabelTaxonomy& taxonomy);
/// Errors: IoError, ConfigInvalid.
LabelTaxonomy load_taxonomy(const std::filesystem::path& path);
/// The compiled-in copy of data/taxonomy.json.
const LabelTaxonomy& default_taxonomy();
/// Raw text of the compiled-in taxonomy.
std::string_view default_taxonomy_json();

}  // namespace mvgen
