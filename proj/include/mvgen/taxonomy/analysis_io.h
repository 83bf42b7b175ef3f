#pragma once

/// @file analysis_io.h
/// @brief Sentence rendering and persistence of analyses.

#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "mvgen/taxonomy/classifier.h"

namespace mvgen {

/// "<Display name> is <label>." for one classification.
std::string sentence(const CategoryClassification& c);

/// Sentences in order, each followed by one space.
std::string render_sentences(std::span<const CategoryClassification> classifications);

/// Text forms for analysis/track.txt and analysis/segment_<i>.txt, one
/// sentence per line.
std::string track_analysis_text(const TrackAnalysis& track);
std::string segment_analysis_text(const SegmentAnalysis& segment);

/// Everything the Analyze stage produced, as reloaded by later stages.
struct AnalysisBundle {
  std::string taxonomy_version;
  TrackAnalysis track;
  std::vector<SegmentAnalysis> segments;  ///< empty for the story pipeline
};

nlohmann::json to_json(const CategoryClassification& c);
nlohmann::json to_json(const AnalysisBundle& bundle);
/// Errors: ManifestCorrupt.
AnalysisBundle analysis_from_json(const nlohmann::json& doc);

}  // namespace mvgen
