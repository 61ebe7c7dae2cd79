#include <string>

#include "fredholm/text_format.hpp"
#include "json_io.hpp"

namespace fredholm {

namespace detail {

using ordered_json = nlohmann::ordered_json;

ordered_json estimate_to_json(const IndexEstimate& e) {
  ordered_json j;
  j["name"] = std::string(engine_name(e.engine));
  if (e.value) {
    j["value"] = *e.value;
  } else {
    j["value"] = "undetermined";
  }
  j["residual"] = e.residual;
  ordered_json history = ordered_json::array();
  for (const auto& h : e.history) history.push_back(ordered_json::array({h.param, h.raw}));
  j["history"] = std::move(history);
  if (!e.note.empty()) j["note"] = e.note;
  return j;
}

ordered_json report_to_json(const IndexReport& r) {
  ordered_json j;
  j["spec"] = format_operator_spec(r.spec);
  ordered_json engines = ordered_json::array();
  for (const auto& e : r.estimates) engines.push_back(estimate_to_json(e));
  j["engines"] = std::move(engines);
  j["agreed"] = r.agreed;
  if (r.consensus) {
    j["consensus"] = *r.consensus;
  } else {
    j["consensus"] = "undetermined";
  }
  return j;
}

ordered_json ladder_to_json(const LadderConfig& ladder) {
  ordered_json j;
  j["sizes"] = ladder.sizes;
  if (ladder.buffer) {
    j["buffer"] = *ladder.buffer;
  } else {
    j["buffer"] = "auto";
  }
  j["sv_tol"] = ladder.sv_tol;
  j["stabilization"] = ladder.stabilization;
  return j;
}

}  // namespace detail

std::string to_json_text(const IndexReport& report, int indent) { return detail::report_to_json(report).dump(indent); }

}  // namespace fredholm
