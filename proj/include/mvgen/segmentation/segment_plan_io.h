#pragma once

#include <string>

#include "json.hpp"
#include "mvgen/segmentation/types.h"

namespace mvgen {

nlohmann::json to_json(const SegmentPlan& plan);
/// Throws ManifestCorrupt on schema violations and IntegrityError when the
/// decoded plan does not tile.
SegmentPlan segment_plan_from_json(const nlohmann::json& doc);

/// Fixed-width table for the run directory.
std::string to_text(const SegmentPlan& plan);

}  // namespace mvgen
