#include "mvgen/taxonomy/analysis_io.h"

#include <cstdio>

#include "mvgen/util/error.h"

namespace mvgen {

using nlohmann::json;

std::string sentence(const CategoryClassification& c) { return c.display_name + " is " + c.chosen_label + "."; }

std::string render_sentences(std::span<const CategoryClassification> classifications) {
  std::string out;
  for (const auto& c : classifications) out += sentence(c) + " ";
  return out;
}

std::string track_analysis_text(const TrackAnalysis& track) {
  std::string out = "Content style:\n";
  for (const auto& c : track.content_style) out += sentence(c) + "\n";
  out += "\nVisual style:\n";
  for (const auto& c : track.visual_style) out += sentence(c) + "\n";
  return out;
}

std::string segment_analysis_text(const SegmentAnalysis& segment) {
  char dur[32];
  std::snprintf(dur, sizeof dur, "%.3f", segment.duration_s);
  std::string out = "Segment " + std::to_string(segment.segment_index) + " (" + dur + " s):\n";
  for (const auto& c : segment.classifications) out += sentence(c) + "\n";
  return out;
}

json to_json(const CategoryClassification& c) {
  return {{"category_id", c.category_id},
          {"display_name", c.display_name},
          {"chosen_label", c.chosen_label},
          {"labels", c.labels},
          {"scores", c.scores}};
}

namespace {

json list_to_json(const std::vector<CategoryClassification>& list) {
  json arr = json::array();
  for (const auto& c : list) arr.push_back(to_json(c));
  return arr;
}

std::vector<CategoryClassification> list_from_json(const json& arr) {
  std::vector<CategoryClassification> out;
  for (const json& j : arr) {
    CategoryClassification c;
    c.category_id = j.at("category_id").get<std::string>();
    c.display_name = j.at("display_name").get<std::string>();
    c.chosen_label = j.at("chosen_label").get<std::string>();
    c.labels = j.at("labels").get<std::vector<std::string>>();
    c.scores = j.at("scores").get<std::vector<float>>();
    if (c.labels.size() != c.scores.size()) throw Error(ErrorCode::ManifestCorrupt, "labels/scores length differ");
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

json to_json(const AnalysisBundle& bundle) {
  json segs = json::array();
  for (const auto& s : bundle.segments) {
    segs.push_back({{"segment_index", s.segment_index},
                    {"duration_s", s.duration_s},
                    {"classifications", list_to_json(s.classifications)}});
  }
  return {{"taxonomy_version", bundle.taxonomy_version},
          {"track",
           {{"content_style", list_to_json(bundle.track.content_style)},
            {"visual_style", list_to_json(bundle.track.visual_style)}}},
          {"segments", segs}};
}

AnalysisBundle analysis_from_json(const json& doc) {
  AnalysisBundle b;
  try {
    b.taxonomy_version = doc.at("taxonomy_version").get<std::string>();
    b.track.content_style = list_from_json(doc.at("track").at("content_style"));
    b.track.visual_style = list_from_json(doc.at("track").at("visual_style"));
    for (const json& s : doc.at("segments")) {
      SegmentAnalysis a;
      a.segment_index = s.at("segment_index").get<int>();
      a.duration_s = s.at("duration_s").get<double>();
      a.classifications = list_from_json(s.at("classifications"));
      b.segments.push_back(std::move(a));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ManifestCorrupt, std::string("malformed analysis document: ") + e.what());
  }
  return b;
}

}  // namespace mvgen
