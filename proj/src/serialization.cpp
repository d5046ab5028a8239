#include "linmix/serialization.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace linmix {

using nlohmann::ordered_json;

ordered_json to_json(const GrowthChain& chain) {
  ordered_json j;
  j["kind"] = chain.spec().kind;
  j["params"] = ordered_json::object();
  for (const auto& [k, v] : chain.spec().params) j["params"][k] = v;
  j["K_max"] = chain.k_max();
  if (chain.spec().kind == "table") {
    std::vector<double> w, w1, w0;
    for (int k = 1; k <= chain.k_max(); ++k) {
      w.push_back(chain.omega(k));
      w1.push_back(chain.omega1(k));
    }
    for (int k = 1; k <= chain.omega0_range(); ++k) w0.push_back(chain.omega0(k));
    j["omega"] = w;
    j["omega1"] = w1;
    j["omega0"] = w0;
  }
  return j;
}

GrowthChain chain_from_json(const ordered_json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "table")
    return GrowthChain::from_tables(j.at("omega").get<std::vector<double>>(), j.at("omega1").get<std::vector<double>>(),
                                    j.at("omega0").get<std::vector<double>>());
  GrowthSpec spec{kind, {}};
  for (const auto& [k, v] : j.at("params").items()) spec.params[k] = v.get<double>();
  return build_growth_chain(spec, j.at("K_max").get<int>());
}

ordered_json to_json(const SymbolWeights& w) {
  ordered_json j;
  j["p"] = w.log_masses();
  if (std::isfinite(w.log_remainder()))
    j["log_remainder"] = w.log_remainder();
  else
    j["log_remainder"] = nullptr;
  return j;
}

SymbolWeights weights_from_json(const ordered_json& j) {
  const auto& r = j.at("log_remainder");
  const double lr = r.is_null() ? -std::numeric_limits<double>::infinity() : r.get<double>();
  return SymbolWeights::from_log_masses(j.at("p").get<std::vector<double>>(), lr);
}

ordered_json to_json(const BlockSchedule& s) {
  ordered_json j;
  j["N"] = s.values();
  j["N_minimal"] = s.minimal();
  j["log_beta"] = s.log_betas();
  j["tails"] = s.tails();
  return j;
}

BlockSchedule schedule_from_json(const ordered_json& j) {
  return BlockSchedule(j.at("N").get<std::vector<std::int64_t>>(), j.at("N_minimal").get<std::vector<std::int64_t>>(),
                       j.at("log_beta").get<std::vector<double>>(), j.at("tails").get<std::vector<double>>());
}

ordered_json measure_document(const GrowthChain& chain, const SymbolWeights& w, const BlockSchedule& s) {
  ordered_json j = to_json(w);
  j["N"] = s.values();
  j["chain"] = to_json(chain);
  j["schedule"] = to_json(s);
  return j;
}

}  // namespace linmix
