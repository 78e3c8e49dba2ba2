#pragma once

#include <json.hpp>

#include "minicminor/behavior.hpp"
#include "minicminor/bigstep.hpp"
#include "minicminor/difftest.hpp"
#include "minicminor/smallstep.hpp"

namespace cminor {

nlohmann::json to_json(const Env& env);
nlohmann::json to_json(const Event& event);
nlohmann::json to_json(const Trace& trace);
nlohmann::json to_json(const smallstep::BoundedRun& run);
nlohmann::json to_json(const bigstep::BigResult& result);  // program-level result
nlohmann::json to_json(const behavior::BoundedBehavior& behavior);
nlohmann::json to_json(const behavior::RefinementVerdict& verdict);
nlohmann::json to_json(const difftest::DiffReport& report);

}  // namespace cminor
