#include "mvgen/taxonomy/taxonomy.h"

#include <set>

#include "mvgen/util/error.h"
#include "mvgen/util/files.h"

namespace mvgen {

using nlohmann::json;

// Generated from data/taxonomy.json at configure time.
extern const char* const kDefaultTaxonomyJson;

std::string_view to_string(LabelScope scope) {
  switch (scope) {
    case LabelScope::SegmentWise: return "segment_wise";
    case LabelScope::ContentStyle: return "content_style";
    case LabelScope::VisualStyle: return "visual_style";
  }
  return "segment_wise";
}

LabelScope label_scope_from_string(std::string_view name) {
  if (name == "segment_wise") return LabelScope::SegmentWise;
  if (name == "content_style") return LabelScope::ContentStyle;
  if (name == "visual_style") return LabelScope::VisualStyle;
  throw Error(ErrorCode::ConfigInvalid, "unknown label scope: " + std::string(name));
}

std::vector<const LabelCategory*> LabelTaxonomy::in_scope(LabelScope scope) const {
  std::vector<const LabelCategory*> out;
  for (const auto& c : categories) {
    if (c.scope == scope) out.push_back(&c);
  }
  return out;
}

const LabelCategory* LabelTaxonomy::find(std::string_view id) const {
  for (const auto& c : categories) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

void LabelTaxonomy::validate() const {
  std::vector<std::string> problems;
  std::set<std::string> ids;
  std::set<LabelScope> scopes;
  for (const auto& c : categories) {
    if (c.id.empty()) problems.push_back("category with empty id");
    if (!ids.insert(c.id).second) problems.push_back("duplicate category id '" + c.id + "'");
    if (c.display_name.empty()) problems.push_back("category '" + c.id + "' has no display name");
    scopes.insert(c.scope);
    if (c.labels.empty()) {
      problems.push_back("category '" + c.id + "' has no labels");
    } else if (c.labels.size() < 2 && !c.degenerate) {
      problems.push_back("category '" + c.id + "' has a single label but is not marked degenerate");
    }
    std::set<std::string> seen;
    for (const auto& l : c.labels) {
      if (l.empty()) problems.push_back("category '" + c.id + "' has an empty label");
      if (!seen.insert(l).second) problems.push_back("category '" + c.id + "' repeats label '" + l + "'");
    }
  }
  for (LabelScope s : {LabelScope::SegmentWise, LabelScope::ContentStyle, LabelScope::VisualStyle}) {
    if (!scopes.count(s)) problems.push_back("no category with scope " + std::string(to_string(s)));
  }
  if (!problems.empty()) {
    throw Error(ErrorCode::ConfigInvalid, "invalid taxonomy (" + std::to_string(problems.size()) + " problems)",
                {{"problems", problems}});
  }
}

LabelTaxonomy taxonomy_from_json(const json& doc) {
  LabelTaxonomy t;
  try {
    t.version = doc.at("version").get<std::string>();
    for (const json& c : doc.at("categories")) {
      LabelCategory cat;
      cat.id = c.at("id").get<std::string>();
      cat.display_name = c.at("display_name").get<std::string>();
      cat.scope = label_scope_from_string(c.at("scope").get<std::string>());
      cat.labels = c.at("labels").get<std::vector<std::string>>();
      cat.degenerate = c.value("degenerate", false);
      t.categories.push_back(std::move(cat));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("malformed taxonomy: ") + e.what());
  }
  t.validate();
  return t;
}

json to_json(const LabelTaxonomy& taxonomy) {
  json cats = json::array();
  for (const auto& c : taxonomy.categories) {
    json j = {{"id", c.id}, {"display_name", c.display_name}, {"scope", to_string(c.scope)}, {"labels", c.labels}};
    if (c.degenerate) j["degenerate"] = true;
    cats.push_back(std::move(j));
  }
  return {{"version", taxonomy.version}, {"categories", cats}};
}

LabelTaxonomy load_taxonomy(const std::filesystem::path& path) {
  auto doc = json::parse(read_file(path), nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::ConfigInvalid, "taxonomy is not valid JSON: " + path.string());
  return taxonomy_from_json(doc);
}

std::string_view default_taxonomy_json() { return kDefaultTaxonomyJson; }

const LabelTaxonomy& default_taxonomy() {
  static const LabelTaxonomy t = taxonomy_from_json(json::parse(kDefaultTaxonomyJson));
  return t;
}

}  // namespace mvgen
