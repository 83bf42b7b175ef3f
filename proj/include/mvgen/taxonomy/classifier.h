#pragma once

/// @file classifier.h
/// @brief Zero-shot classification by cosine similarity in a joint
/// audio/text embedding space.

#include <map>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "mvgen/audio/audio_buffer.h"
#include "mvgen/backends/protocol.h"
#include "mvgen/segmentation/types.h"
#include "mvgen/taxonomy/taxonomy.h"

namespace mvgen {

struct CategoryClassification {
  std::string category_id;
  std::string display_name;
  std::string chosen_label;
  std::vector<std::string> labels;
  std::vector<float> scores;  ///< cosine similarity per label, taxonomy order
};

struct SegmentAnalysis {
  int segment_index = 0;
  double duration_s = 0.0;
  std::vector<CategoryClassification> classifications;  ///< one per segment-wise category
};

struct TrackAnalysis {
  std::vector<CategoryClassification> content_style;
  std::vector<CategoryClassification> visual_style;
};

/// Label-text embeddings keyed by (backend identity, label). Readers share
/// the lock; misses embed outside it and insert under an exclusive lock.
class LabelEmbeddingCache {
 public:
  std::vector<Embedding> get(EmbeddingBackend& backend, std::span<const std::string> labels);
  std::size_t size() const;

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, Embedding> entries_;
};

/// Copy scaled to unit L2 norm. Errors: BackendMalformed for a zero or
/// non-finite vector.
Embedding l2_normalized(std::span<const float> v);

/// Scores every label against an audio embedding (both normalized here) and
/// picks the highest score, lowest index on ties. Errors: EmptyCategory,
/// BackendMalformed on dimension mismatch.
CategoryClassification classify_embedding(std::span<const float> audio_embedding, const LabelCategory& category,
                                          std::span<const Embedding> label_embeddings);

/// Embeds `audio` and the category labels, then classify_embedding.
CategoryClassification classify_category(const AudioBuffer& audio, const LabelCategory& category,
                                         EmbeddingBackend& backend, LabelEmbeddingCache* cache = nullptr);

struct AnalysisOptions {
  /// Upper bound on concurrent backend requests.
  int max_concurrency = 4;
  LabelEmbeddingCache* cache = nullptr;
};

/// One record per plan segment, in plan order. Backend errors are rethrown
/// with the failing segment index in the message and details.
std::vector<SegmentAnalysis> analyze_segments(const AudioBuffer& buffer, const SegmentPlan& plan,
                                              const LabelTaxonomy& taxonomy, EmbeddingBackend& backend,
                                              const AnalysisOptions& options = {});

/// Classifies the whole buffer once per content-style and visual-style category.
TrackAnalysis analyze_track(const AudioBuffer& buffer, const LabelTaxonomy& taxonomy, EmbeddingBackend& backend,
                            LabelEmbeddingCache* cache = nullptr);

}  // namespace mvgen
