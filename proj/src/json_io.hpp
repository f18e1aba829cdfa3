#pragma once

// Internal JSON helpers shared by the sweep and report writers.

#include "avpgarage/visibility.hpp"
#include "json.hpp"

namespace avpgarage::detail {

nlohmann::ordered_json sweep_value(const OcclusionSweep& sweep);
OcclusionSweep sweep_from_value(const nlohmann::json& value);

}  // namespace avpgarage::detail
