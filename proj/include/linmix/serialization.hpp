#pragma once

#include <json.hpp>

#include "linmix/block_schedule.hpp"
#include "linmix/measure_params.hpp"

namespace linmix {

nlohmann::ordered_json to_json(const GrowthChain& chain);
GrowthChain chain_from_json(const nlohmann::ordered_json& j);

/** {"p": [log p_l], "log_remainder": x}; a zero remainder is written as null. */
nlohmann::ordered_json to_json(const SymbolWeights& w);
SymbolWeights weights_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json to_json(const BlockSchedule& s);
BlockSchedule schedule_from_json(const nlohmann::ordered_json& j);

/** {"p": [...], "log_remainder": ..., "N": [...], "chain": {...}, "schedule": {...}}. */
nlohmann::ordered_json measure_document(const GrowthChain& chain, const SymbolWeights& w, const BlockSchedule& s);

}  // namespace linmix
