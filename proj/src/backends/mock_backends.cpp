#include "mvgen/backends/mock_backends.h"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <regex>

#include "mvgen/audio/wav_io.h"
#include "mvgen/simd/kernels.h"
#include "mvgen/util/error.h"
#include "mvgen/util/files.h"
#include "mvgen/util/hashing.h"

namespace mvgen {

namespace {

// Uniform in (0, 1] from the raw generator output; std distributions are not
// specified bit-exactly across standard libraries.
double unit_open(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * (1.0 / 9007199254740992.0);
}

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

void normalize(Embedding& v) {
  const double norm = std::sqrt(simd::sum_squares(v));
  if (norm <= 0.0) return;
  for (float& x : v) x = static_cast<float>(x / norm);
}

constexpr std::array<const char*, 8> kSubjects = {
    "A woman in a red coat", "A girl on a bicycle", "An old fisherman", "A small grey dog",
    "A dancer in white",     "A boy with a kite",       "A stranger in a long coat", "A lone violinist"};
constexpr std::array<const char*, 8> kActions = {
    "walks slowly along",  "runs across",           "stands still on", "spins in circles on",
    "looks out over",      "climbs toward the top of", "waits quietly by", "laughs loudly on"};
constexpr std::array<const char*, 8> kPlaces = {
    "a rain-soaked city street", "a windy hillside",      "an empty beach at dawn", "a crowded night market",
    "a frozen lake",             "a rooftop under stars", "a sunflower field",      "a quiet train platform"};

}  // namespace

Embedding hash_to_sphere(std::string_view payload, std::uint64_t seed, std::size_t dim) {
  MVGEN_CHECK(dim > 0, ErrorCode::InvalidArgument, "embedding dimension must be positive");
  std::mt19937_64 rng(sha256_u64(payload) ^ seed);
  Embedding v(dim);
  // Box-Muller, two components per pair of uniforms.
  for (std::size_t i = 0; i < dim; i += 2) {
    const double r = std::sqrt(-2.0 * std::log(unit_open(rng)));
    const double theta = 2.0 * std::numbers::pi * unit_open(rng);
    v[i] = static_cast<float>(r * std::cos(theta));
    if (i + 1 < dim) v[i + 1] = static_cast<float>(r * std::sin(theta));
  }
  normalize(v);
  return v;
}

std::string HashEmbeddingBackend::identity() const {
  return "mock-hash-embed-" + std::to_string(dim_) + "-seed" + std::to_string(seed_);
}

Embedding HashEmbeddingBackend::embed_audio(const AudioBuffer& audio) {
  MVGEN_CHECK(!audio.empty(), ErrorCode::ZeroLength, "cannot embed empty audio");
  return hash_to_sphere("audio:" + encode_wav(audio), seed_, dim_);
}

std::vector<Embedding> HashEmbeddingBackend::embed_texts(std::span<const std::string> texts) {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const std::string& t : texts) out.push_back(hash_to_sphere("text:" + t, seed_, dim_));
  return out;
}

LabelForcingEmbeddingBackend::LabelForcingEmbeddingBackend(std::vector<std::string> labels,
                                                           std::uint64_t seed)
    : chooser_([labels = std::move(labels)](const AudioBuffer&) { return labels; }), text_(seed) {}

Embedding LabelForcingEmbeddingBackend::embed_audio(const AudioBuffer& audio) {
  const std::vector<std::string> labels = chooser_(audio);
  MVGEN_CHECK(!labels.empty(), ErrorCode::InvalidArgument, "label-forcing mock chose no labels");
  const auto vectors = text_.embed_texts(labels);
  Embedding sum(vectors.front().size(), 0.0f);
  for (const Embedding& v : vectors) {
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += v[i];
  }
  normalize(sum);
  return sum;
}

std::string last_user_text(const Conversation& conversation) {
  for (auto it = conversation.rbegin(); it != conversation.rend(); ++it) {
    if (it->role == ChatRole::User && it->text) return *it->text;
  }
  return {};
}

std::string TemplateChatBackend::chat(const Conversation& conversation, const ChatOptions& options) {
  MVGEN_CHECK(!conversation.empty(), ErrorCode::InvalidArgument, "empty conversation");
  const std::string prompt = last_user_text(conversation);
  std::string key = prompt;
  for (const ChatMessage& m : conversation) {
    if (m.audio) key += "\naudio:" + sha256_hex(m.audio->load());
  }
  std::mt19937_64 rng(sha256_u64(key) ^ options.seed);

  static const std::regex kCount(R"(There (?:are|is) (\d+) scenes? in total\.)");
  std::smatch m;
  if (std::regex_search(prompt, m, kCount)) {
    const int n = std::stoi(m[1].str());
    MVGEN_CHECK(n > 0, ErrorCode::InvalidArgument, "scene count must be positive");
    std::string out = "<think>\nThe request asks for " + std::to_string(n) +
                      " scenes. Each one starts with its SCENE marker and the script follows "
                      "BEGIN SCRIPT.\n</think>\n\nBEGIN SCRIPT\n\n";
    const std::string subject = kSubjects[pick(rng, kSubjects.size())];
    for (int i = 1; i <= n; ++i) {
      out += "SCENE " + std::to_string(i) + ": " + subject + " " + kActions[pick(rng, kActions.size())] +
             " " + kPlaces[pick(rng, kPlaces.size())] + ".\n\n";
    }
    out += "END SCRIPT\n";
    return out;
  }

  const std::string subject = kSubjects[pick(rng, kSubjects.size())];
  std::string story = "In the music video, " + std::string(1, static_cast<char>(std::tolower(subject[0]))) +
                      subject.substr(1) + " " + kActions[pick(rng, kActions.size())] + " " +
                      kPlaces[pick(rng, kPlaces.size())] + ". ";
  story += "As the music builds, the scene shifts to " + std::string(kPlaces[pick(rng, kPlaces.size())]) + ". ";
  story += "By the final chorus, everything returns to " + std::string(kPlaces[pick(rng, kPlaces.size())]) +
           ", changed but hopeful.";
  return story;
}

ReplayChatBackend::ReplayChatBackend(const std::filesystem::path& dir) {
  std::error_code ec;
  MVGEN_CHECK(std::filesystem::is_directory(dir, ec), ErrorCode::IoError,
              "replay directory not found: " + dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".txt") continue;
    responses_[entry.path().stem().string()] = read_file(entry.path());
  }
}

void ReplayChatBackend::add(const std::string& prompt, std::string response) {
  responses_[sha256_hex(prompt)] = std::move(response);
}

std::string ReplayChatBackend::chat(const Conversation& conversation, const ChatOptions&) {
  const std::string key = sha256_hex(last_user_text(conversation));
  auto it = responses_.find(key);
  if (it == responses_.end()) {
    throw Error(ErrorCode::BackendTransport, "no recorded response for this prompt",
                {{"prompt_sha256", key}});
  }
  return it->second;
}

VideoPayload PatternVideoBackend::generate(const VideoRequest& request) {
  MVGEN_CHECK(request.duration_s > 0.0 && request.fps > 0.0, ErrorCode::InvalidArgument,
              "video request needs positive duration and fps");
  MVGEN_CHECK(request.width > 0 && request.height > 0, ErrorCode::InvalidArgument,
              "video request needs positive dimensions");
  const auto base = std::max<long>(1, std::lround(request.duration_s * request.fps));
  const auto count = static_cast<std::size_t>(std::max<long>(1, base + extra_frames_));

  const std::uint64_t h = sha256_u64(request.prompt + "\nseed:" + std::to_string(request.seed));
  const std::uint8_t r = static_cast<std::uint8_t>(h >> 56);
  const std::uint8_t g = static_cast<std::uint8_t>(h >> 48);
  const std::uint8_t b = static_cast<std::uint8_t>(h >> 40);

  VideoPayload out;
  out.fps = request.fps;
  out.width = request.width;
  out.height = request.height;
  out.frames.reserve(count);
  const std::size_t stride = static_cast<std::size_t>(request.width) * 3;
  for (std::size_t f = 0; f < count; ++f) {
    Frame frame{request.width, request.height, std::vector<std::uint8_t>(stride * request.height)};
    for (std::size_t i = 0; i < frame.rgb.size(); i += 3) {
      frame.rgb[i] = r;
      frame.rgb[i + 1] = g;
      frame.rgb[i + 2] = b;
    }
    const std::size_t row = f % static_cast<std::size_t>(request.height);
    std::fill_n(frame.rgb.begin() + static_cast<std::ptrdiff_t>(row * stride), stride, std::uint8_t{255});
    out.frames.push_back(std::move(frame));
  }
  return out;
}

BackendSet make_mock_backends(std::uint64_t seed) {
  BackendSet set;
  set.embed = std::make_shared<HashEmbeddingBackend>(seed);
  auto chat = std::make_shared<TemplateChatBackend>();
  set.chat = chat;
  set.chat_audio = chat;
  set.video = std::make_shared<PatternVideoBackend>();
  return set;
}

}  // namespace mvgen
