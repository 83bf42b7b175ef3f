#include "test_support.h"

#include <stdlib.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "mvgen/audio/test_signals.h"
#include "mvgen/audio/wav_io.h"
#include "mvgen/taxonomy/taxonomy.h"
#include "mvgen/util/files.h"

namespace mvgen::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  std::string tmpl = (fs::temp_directory_path() / "mvgen_test_XXXXXX").string();
  if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

fs::path fixture_path(const std::string& name) { return fs::path(MVGEN_FIXTURE_DIR) / name; }

std::string read_fixture(const std::string& name) { return read_file(fixture_path(name)); }

std::vector<double> example_section_ends() {
  // Summed in hundredths so the ends are exact decimal values.
  std::vector<double> ends;
  long cents = 0;
  for (double d : kExampleDurations) {
    cents += std::lround(d * 100.0);
    ends.push_back(static_cast<double>(cents) / 100.0);
  }
  return ends;
}

SegmentPlan example_plan() {
  SegmentPlan plan;
  double start = 0.0;
  int i = 0;
  for (double end : example_section_ends()) {
    plan.segments.push_back(Segment{i++, TimeSpan{start, end}, CutReason::SpectralChange});
    start = end;
  }
  plan.segments.back().cut_reason = CutReason::EndOfTrack;
  plan.track_duration_s = start;
  plan.method = SegmentationMethod::RuleBased;
  return plan;
}

SegmentPlan uniform_plan(std::size_t count, double seconds) {
  SegmentPlan plan;
  for (std::size_t i = 0; i < count; ++i) {
    plan.segments.push_back(Segment{static_cast<int>(i), TimeSpan{seconds * static_cast<double>(i),
                                                                  seconds * static_cast<double>(i + 1)},
                                    CutReason::RandomLength});
  }
  plan.segments.back().cut_reason = CutReason::EndOfTrack;
  plan.track_duration_s = seconds * static_cast<double>(count);
  plan.method = SegmentationMethod::Random;
  return plan;
}

CategoryClassification chosen(const std::string& category_id, const std::string& label) {
  const LabelCategory* cat = default_taxonomy().find(category_id);
  if (!cat) throw std::runtime_error("unknown category " + category_id);
  const auto it = std::find(cat->labels.begin(), cat->labels.end(), label);
  if (it == cat->labels.end()) throw std::runtime_error("label not in " + category_id + ": " + label);
  CategoryClassification c;
  c.category_id = cat->id;
  c.display_name = cat->display_name;
  c.chosen_label = label;
  c.labels = cat->labels;
  c.scores.assign(cat->labels.size(), 0.0f);
  c.scores[static_cast<std::size_t>(it - cat->labels.begin())] = 1.0f;
  return c;
}

ExampleAnalyses example_analyses() {
  ExampleAnalyses a;
  a.track.content_style = {
      chosen("instrumental_energy", "It has multiple peaks and valleys throughout."),
      chosen("instrumental_palette", "Orchestral or cinematic instruments"),
      chosen("tempo_range", "Very fast (140+ BPM)"),
      chosen("production_quality", "Very polished, glossy, and modern"),
      chosen("mood", "Uplifting and bright"),
  };
  a.track.visual_style = {
      chosen("location", "exterior"),
      chosen("visual_setting", "Natural"),
      chosen("visual_style", "Monochromatic or limited color palette"),
      chosen("visual_focus", "Multiple focal points or characters"),
  };
  const std::string moderate = "Moderate intensity with a clear beat";
  const std::string high = "High energy and full instrumentation";
  const std::string strings = "String or orchestral elements";
  const std::string synths = "Synths or electronic sounds";
  const std::string fluct = "It fluctuates multiple times within the segment";
  const std::string loud = "It stays uniformly loud/energetic";
  const std::string irregular = "Irregular or changing time signatures";
  struct Row {
    std::string intensity, element, shift, transition;
  };
  const std::vector<Row> rows = {
      {moderate, strings, fluct, "It acts as a noticeable break or \"breather\""},
      {moderate, strings, fluct, "It features a sudden drop or pause before the next section"},
      {high, strings, fluct, "It features a sudden drop or pause before the next section"},
      {high, strings, fluct, "It cleanly continues the energy from the previous segment"},
      {moderate, strings, loud, "It slowly fades out or prepares for a drop"},
      {high, synths, fluct, "It dramatically shifts the energy or mood"},
      {high, strings, fluct, "It features a sudden drop or pause before the next section"},
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    SegmentAnalysis s;
    s.segment_index = static_cast<int>(i);
    s.duration_s = kExampleDurations[i];
    s.classifications = {chosen("instrumental_intensity", rows[i].intensity),
                         chosen("prominent_element", rows[i].element), chosen("dynamic_shift", rows[i].shift),
                         chosen("rhythm", irregular), chosen("transition_function", rows[i].transition)};
    a.segments.push_back(std::move(s));
  }
  return a;
}

void write_example_song(const fs::path& path, int sample_rate) {
  WavData wav;
  wav.interleaved = signals::sectioned_track(example_section_ends(), 120.0, sample_rate);
  wav.sample_rate = sample_rate;
  wav.channels = 1;
  write_wav(path, wav);
}

namespace {

std::map<std::string, fs::path> listing(const fs::path& root, const std::vector<std::string>& ignore) {
  std::map<std::string, fs::path> out;
  for (auto it = fs::recursive_directory_iterator(root); it != fs::recursive_directory_iterator(); ++it) {
    const std::string name = it->path().filename().string();
    if (std::find(ignore.begin(), ignore.end(), name) != ignore.end()) {
      if (it->is_directory()) it.disable_recursion_pending();
      continue;
    }
    out[fs::relative(it->path(), root).generic_string()] = it->path();
  }
  return out;
}

}  // namespace

bool trees_equal(const fs::path& a, const fs::path& b, const std::vector<std::string>& ignore,
                 std::string* first_difference) {
  const auto la = listing(a, ignore);
  const auto lb = listing(b, ignore);
  auto report = [&](const std::string& what) {
    if (first_difference) *first_difference = what;
    return false;
  };
  for (const auto& [rel, pa] : la) {
    const auto it = lb.find(rel);
    if (it == lb.end()) return report("only in first: " + rel);
    if (fs::is_directory(pa) != fs::is_directory(it->second)) return report("type differs: " + rel);
    if (fs::is_regular_file(pa) && read_file(pa) != read_file(it->second)) return report("content differs: " + rel);
  }
  for (const auto& [rel, pb] : lb) {
    if (!la.count(rel)) return report("only in second: " + rel);
  }
  return true;
}

}  // namespace mvgen::testing
