#include "mvgen/segmentation/segment_plan_io.h"

#include <cstdio>

#include "mvgen/segmentation/segmenter.h"
#include "mvgen/util/error.h"

namespace mvgen {

nlohmann::json to_json(const SegmentPlan& plan) {
  nlohmann::json segs = nlohmann::json::array();
  for (const Segment& s : plan.segments) {
    segs.push_back({{"index", s.index},
                    {"start_s", s.span.start_s},
                    {"end_s", s.span.end_s},
                    {"cut_reason", std::string(to_string(s.cut_reason))}});
  }
  return {{"method", std::string(to_string(plan.method))},
          {"seed", plan.seed},
          {"track_duration_s", plan.track_duration_s},
          {"segments", segs}};
}

SegmentPlan segment_plan_from_json(const nlohmann::json& doc) {
  SegmentPlan plan;
  try {
    plan.method = segmentation_method_from_string(doc.at("method").get<std::string>());
    plan.seed = doc.at("seed").get<std::uint64_t>();
    plan.track_duration_s = doc.at("track_duration_s").get<double>();
    for (const auto& s : doc.at("segments")) {
      Segment seg;
      seg.index = s.at("index").get<int>();
      seg.span = TimeSpan{s.at("start_s").get<double>(), s.at("end_s").get<double>()};
      seg.cut_reason = cut_reason_from_string(s.at("cut_reason").get<std::string>());
      plan.segments.push_back(seg);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ManifestCorrupt, std::string("malformed segment plan: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::ManifestCorrupt, std::string("malformed segment plan: ") + e.what());
  }
  check_tiling(plan);
  return plan;
}

std::string to_text(const SegmentPlan& plan) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "method: %s\nseed: %llu\ntrack duration: %.3f s\nsegments: %zu\n\n",
                std::string(to_string(plan.method)).c_str(),
                static_cast<unsigned long long>(plan.seed), plan.track_duration_s, plan.segments.size());
  out += line;
  out += "index  start_s   end_s     duration_s  cut_reason\n";
  for (const Segment& s : plan.segments) {
    std::snprintf(line, sizeof line, "%-6d %-9.3f %-9.3f %-11.3f %s\n", s.index, s.span.start_s,
                  s.span.end_s, s.duration(), std::string(to_string(s.cut_reason)).c_str());
    out += line;
  }
  return out;
}

}  // namespace mvgen
