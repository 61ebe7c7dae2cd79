#pragma once

// nlohmann/json conversions kept out of the public headers.

#include <json.hpp>

#include "fredholm/index_engines.hpp"

namespace fredholm::detail {

nlohmann::ordered_json estimate_to_json(const IndexEstimate& e);
nlohmann::ordered_json report_to_json(const IndexReport& r);
nlohmann::ordered_json ladder_to_json(const LadderConfig& ladder);

}  // namespace fredholm::detail
