#pragma once

// JSON mapping shared by the config serializer and the results store.

#include "json.hpp"
#include "seedlab/tagger/config.hpp"

namespace seedlab::detail {

using Json = nlohmann::ordered_json;

Json config_to_json(const tagger::NetworkConfig& config, bool include_seed);
tagger::NetworkConfig config_from_json(const Json& j);

}  // namespace seedlab::detail
