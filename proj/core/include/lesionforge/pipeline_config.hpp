#pragma once

#include <string>
#include <string_view>

#include "lesionforge/gamma.hpp"
#include "lesionforge/pipeline.hpp"

namespace lesionforge {

/// Current version written to every config and provenance document.
inline constexpr int kSchemaVersion = 1;

// JSON schema (schema_version 1):
//
//   { "schema_version": 1, "seed": 42, "samples_per_study": 3,
//     "ops": [ { "kind": "local-gamma", "probability": 1.0,
//                "channels": ["b1000"], "per_channel": false,
//                "empty_mask": "treat-as-global",
//                "sampler": { "type": "mixture-uniform", "lo1": 0.7, "hi1": 1.0,
//                             "lo2": 1.0, "hi2": 1.5, "p": 0.5 } },
//              { "kind": "gaussian-noise", "sigma": [0.0, 0.1], "relative": true },
//              { "kind": "mirror", "axes": [0, 1, 2] },
//              { "kind": "random-patch", "size": [128, 128, 128] } ] }
//
// Omitted fields take the defaults of the corresponding op struct. Unknown
// keys are rejected so typos surface as config errors.

/// Throws config with the parser diagnostic.
PipelineConfig parse_pipeline_config(std::string_view json);

/// Every field is written explicitly; parse(serialize(c)) == c.
std::string serialize_pipeline_config(const PipelineConfig& config, int indent = 2);

GammaSamplerSpec parse_sampler_spec(std::string_view json);
std::string serialize_sampler_spec(const GammaSamplerSpec& spec);

}  // namespace lesionforge
