#include "mvgen/taxonomy/classifier.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "mvgen/simd/kernels.h"
#include "mvgen/util/error.h"

namespace mvgen {

namespace {

std::string cache_key(const std::string& identity, const std::string& label) { return identity + '\x1f' + label; }

std::vector<CategoryClassification> classify_all(const Embedding& audio, const std::vector<const LabelCategory*>& cats,
                                                 EmbeddingBackend& backend, LabelEmbeddingCache* cache) {
  std::vector<CategoryClassification> out;
  out.reserve(cats.size());
  LabelEmbeddingCache local;
  LabelEmbeddingCache& c = cache ? *cache : local;
  for (const LabelCategory* cat : cats) {
    const auto label_vecs = c.get(backend, cat->labels);
    out.push_back(classify_embedding(audio, *cat, label_vecs));
  }
  return out;
}

}  // namespace

std::vector<Embedding> LabelEmbeddingCache::get(EmbeddingBackend& backend, std::span<const std::string> labels) {
  const std::string identity = backend.identity();
  std::vector<Embedding> out(labels.size());
  std::vector<std::size_t> missing;
  {
    std::shared_lock lock(mutex_);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      auto it = entries_.find(cache_key(identity, labels[i]));
      if (it == entries_.end()) {
        missing.push_back(i);
      } else {
        out[i] = it->second;
      }
    }
  }
  if (missing.empty()) return out;

  std::vector<std::string> texts;
  for (std::size_t i : missing) texts.push_back(labels[i]);
  auto fresh = backend.embed_texts(texts);
  if (fresh.size() != texts.size()) {
    throw Error(ErrorCode::BackendMalformed, "backend returned a different number of text embeddings");
  }
  std::unique_lock lock(mutex_);
  for (std::size_t k = 0; k < missing.size(); ++k) {
    out[missing[k]] = fresh[k];
    entries_.emplace(cache_key(identity, texts[k]), std::move(fresh[k]));
  }
  return out;
}

std::size_t LabelEmbeddingCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

Embedding l2_normalized(std::span<const float> v) {
  const double norm = std::sqrt(static_cast<double>(simd::sum_squares(v)));
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorCode::BackendMalformed, "embedding has zero or non-finite norm");
  }
  Embedding out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i] / norm);
  return out;
}

CategoryClassification classify_embedding(std::span<const float> audio_embedding, const LabelCategory& category,
                                          std::span<const Embedding> label_embeddings) {
  if (category.labels.empty()) {
    throw Error(ErrorCode::EmptyCategory, "category '" + category.id + "' has no labels");
  }
  MVGEN_CHECK(label_embeddings.size() == category.labels.size(), ErrorCode::BackendMalformed,
              "label embedding count does not match the category");
  const Embedding audio = l2_normalized(audio_embedding);

  CategoryClassification out;
  out.category_id = category.id;
  out.display_name = category.display_name;
  out.labels = category.labels;
  out.scores.reserve(category.labels.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < label_embeddings.size(); ++i) {
    if (label_embeddings[i].size() != audio.size()) {
      throw Error(ErrorCode::BackendMalformed, "label and audio embedding dimensions differ",
                  {{"audio_dim", audio.size()}, {"label_dim", label_embeddings[i].size()}});
    }
    const Embedding label = l2_normalized(label_embeddings[i]);
    out.scores.push_back(std::clamp(simd::dot(audio, label), -1.0f, 1.0f));
    if (out.scores[i] > out.scores[best]) best = i;
  }
  out.chosen_label = category.labels[best];
  return out;
}

CategoryClassification classify_category(const AudioBuffer& audio, const LabelCategory& category,
                                         EmbeddingBackend& backend, LabelEmbeddingCache* cache) {
  if (category.labels.empty()) {
    throw Error(ErrorCode::EmptyCategory, "category '" + category.id + "' has no labels");
  }
  const Embedding a = backend.embed_audio(audio);
  return classify_all(a, {&category}, backend, cache).front();
}

std::vector<SegmentAnalysis> analyze_segments(const AudioBuffer& buffer, const SegmentPlan& plan,
                                              const LabelTaxonomy& taxonomy, EmbeddingBackend& backend,
                                              const AnalysisOptions& options) {
  const std::size_t n = plan.segments.size();
  std::vector<SegmentAnalysis> out(n);
  if (n == 0) return out;
  const auto cats = taxonomy.in_scope(LabelScope::SegmentWise);
  LabelEmbeddingCache local;
  LabelEmbeddingCache* cache = options.cache ? options.cache : &local;
  // Warm the cache once so workers only read it.
  for (const LabelCategory* c : cats) cache->get(backend, c->labels);

  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const Segment& seg = plan.segments[i];
        const double end = std::min(seg.span.end_s, buffer.duration_s());
        const double start = std::min(seg.span.start_s, end);
        const AudioBuffer clip = buffer.slice(TimeSpan{start, end});
        out[i].segment_index = seg.index;
        out[i].duration_s = seg.duration();
        out[i].classifications = classify_all(backend.embed_audio(clip), cats, backend, cache);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, options.max_concurrency)), 1, n);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      nlohmann::json details = e.details().is_object() ? e.details() : nlohmann::json::object();
      details["segment_index"] = plan.segments[i].index;
      throw Error(e.code(), "segment " + std::to_string(plan.segments[i].index) + ": " + e.what(), details);
    }
  }
  return out;
}

TrackAnalysis analyze_track(const AudioBuffer& buffer, const LabelTaxonomy& taxonomy, EmbeddingBackend& backend,
                            LabelEmbeddingCache* cache) {
  const Embedding a = backend.embed_audio(buffer);
  TrackAnalysis t;
  t.content_style = classify_all(a, taxonomy.in_scope(LabelScope::ContentStyle), backend, cache);
  t.visual_style = classify_all(a, taxonomy.in_scope(LabelScope::VisualStyle), backend, cache);
  return t;
}

}  // namespace mvgen
