#pragma once

#include <string>

#include "json.hpp"

#include "gpsens/kernel.hpp"
#include "gpsens/warp_net.hpp"
#include "gpsens/workflow.hpp"

namespace gpsens {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "gpsens-report/1";

// Pretty-printed JSON with every floating-point number at 17 significant digits; non-finite
// numbers become null.
std::string dump_json(const Json& value, int indent = 2);
Json parse_json(const std::string& text, const std::string& what = "JSON");

Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json warp_net_to_json(const WarpNet& net);
WarpNet warp_net_from_json(const Json& j);

// {"expr": tree, "warps": [networks]}. Warped nodes refer to networks by index ("warp_ref"), so
// a network shared by several nodes is stored once.
Json kernel_to_json(const Kernel& k);
Kernel kernel_from_json(const Json& j);

Json functional_to_json(const FunctionalSpec& spec);
FunctionalSpec functional_from_json(const Json& j);

Json report_to_json(const SensitivityReport& report, const Kernel& k0);
// Recomputes the verdict from the stored schedule, threshold, direction, tolerance and the
// diagnostic verdict.
std::string reassemble_verdict(const Json& report);

}  // namespace gpsens
