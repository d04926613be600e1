#pragma once

#include <string>

#include "json.hpp"

#include "coarse/group_model.hpp"
#include "coarse/metric.hpp"
#include "coarse/space.hpp"
#include "coarse/witness.hpp"

namespace coarse {

using nlohmann::json;

// exact distance: integer when scale is 1, "num/den" otherwise, "inf" for the whole space
json dist_json(Dist d, Dist scale);
Dist dist_from_json(const json& j, Dist scale);

json verdict_json(const Verdict& v);
json schedule_json(const Schedule& s);
Schedule schedule_from_json(const json& j);

// versioned space file: header, labels, rule descriptor or dense table
json space_json(const FiniteSpace& x, bool with_labels = true);
SpacePtr space_from_json(const json& j, const Limits& lim = {});

json witness_json(const WitnessMap& w);
json report_json(const VerifyReport& r, Dist scale);
json partition_json(const FiniteSpace& x, const ComponentPartition& p);
json step_json(const StepEstimate& s);

}  // namespace coarse
