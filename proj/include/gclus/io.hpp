#pragma once

#include <json.hpp>

#include "gclus/cluster_state.hpp"
#include "gclus/local_search.hpp"
#include "gclus/oracle.hpp"

namespace gclus {

// Debug dump of every maintained array.
nlohmann::json state_to_json(const ClusterState &s);

nlohmann::json result_to_json(const ClusterResult &r, int k, const ClusterOptions &opt);

nlohmann::json opt_to_json(const OptResult &r, int k, double z);

} // namespace gclus
