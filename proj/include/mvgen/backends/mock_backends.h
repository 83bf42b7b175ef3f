#pragma once

/// @file mock_backends.h
/// @brief Deterministic offline backends. Every output is a pure function of
/// the request payload and the construction seed.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mvgen/backends/protocol.h"

namespace mvgen {

inline constexpr std::size_t kMockEmbeddingDim = 512;

/// Unit vector of `dim` Gaussian components drawn from a generator seeded
/// with sha256_u64(payload) ^ seed.
Embedding hash_to_sphere(std::string_view payload, std::uint64_t seed,
                         std::size_t dim = kMockEmbeddingDim);

/// Hash-to-sphere embedder. Audio is hashed in its 16-bit mono WAV form, so
/// a buffer that crossed the wire embeds like the original.
class HashEmbeddingBackend : public EmbeddingBackend {
 public:
  explicit HashEmbeddingBackend(std::uint64_t seed = 0, std::size_t dim = kMockEmbeddingDim)
      : seed_(seed), dim_(dim) {}

  std::string identity() const override;
  Embedding embed_audio(const AudioBuffer& audio) override;
  std::vector<Embedding> embed_texts(std::span<const std::string> texts) override;

 private:
  std::uint64_t seed_;
  std::size_t dim_;
};

/// Embeds texts like HashEmbeddingBackend, but maps each audio buffer to the
/// normalized sum of the text embeddings of the labels `chooser` returns for
/// it. Classification of that audio then lands on the forced labels.
class LabelForcingEmbeddingBackend : public EmbeddingBackend {
 public:
  using Chooser = std::function<std::vector<std::string>(const AudioBuffer&)>;

  LabelForcingEmbeddingBackend(Chooser chooser, std::uint64_t seed = 0)
      : chooser_(std::move(chooser)), text_(seed) {}
  /// Same labels for every buffer.
  LabelForcingEmbeddingBackend(std::vector<std::string> labels, std::uint64_t seed = 0);

  std::string identity() const override { return text_.identity(); }
  Embedding embed_audio(const AudioBuffer& audio) override;
  std::vector<Embedding> embed_texts(std::span<const std::string> texts) override {
    return text_.embed_texts(texts);
  }

 private:
  Chooser chooser_;
  HashEmbeddingBackend text_;
};

/// Chat mock that answers any prompt containing "There are N scenes in
/// total." with a well-formed N-scene script behind a short reasoning
/// preamble, and anything else (such as a story request) with a short story.
class TemplateChatBackend : public ChatBackend {
 public:
  std::string identity() const override { return "mock-template-chat"; }
  std::string chat(const Conversation& conversation, const ChatOptions& options) override;
};

/// Replays recorded responses keyed by the SHA-256 of the last user text.
/// Unknown prompts fail with BackendTransport.
class ReplayChatBackend : public ChatBackend {
 public:
  ReplayChatBackend() = default;
  /// Loads every `<sha256>.txt` file in `dir`.
  explicit ReplayChatBackend(const std::filesystem::path& dir);

  void add(const std::string& prompt, std::string response);
  std::string identity() const override { return "mock-replay-chat"; }
  std::string chat(const Conversation& conversation, const ChatOptions& options) override;

 private:
  std::map<std::string, std::string> responses_;
};

/// Text-to-video mock: max(1, round(duration * fps)) solid frames whose color
/// derives from (prompt hash, seed), with one bright row that moves down one
/// line per frame. `extra_frames` simulates backends that overshoot.
class PatternVideoBackend : public VideoBackend {
 public:
  explicit PatternVideoBackend(int extra_frames = 0) : extra_frames_(extra_frames) {}

  std::string identity() const override { return "mock-pattern-video"; }
  VideoPayload generate(const VideoRequest& request) override;

 private:
  int extra_frames_;
};

/// Hash embedder, template chat for both chat kinds, pattern video.
BackendSet make_mock_backends(std::uint64_t seed = 0);

/// Last user message text in a conversation, or empty.
std::string last_user_text(const Conversation& conversation);

}  // namespace mvgen
