#pragma once

#include <string>

#include "asymdet/model.hpp"

namespace asymdet::config {

// Parse an experiment description. Schema:
//   {
//     "p": 800, "n": 2000,
//     "signal": {"d": [1.5,1.2,0.5], "basis": "standard"}        (or "U","V")
//     "sigma":  {"sigmas": [3,2], "basis": "standard"}           (or "Xi","Theta")
//     "profile": "ones" | {"blocks": [1,1.5]} | {"explicit": [[...]]}
//                (optional "scale" multiplies "ones")
//     "dist": "gaussian" | {"student_t": 2.2} | "rademacher",
//     "trials": 20, "seed": 1,
//     "validation": false, "truncate": 50.0,       (optional)
//     "N_convention": "p+n" | "n" | "p"            (optional)
//   }
// The ASYMSPEC_SEED environment variable overrides the seed.
model::ExperimentConfig parse_config(const std::string& json_text);
model::ExperimentConfig load_config(const std::string& path);

std::string to_json(const model::ExperimentConfig& config);

// Stable short digest of the canonical JSON form, for summary provenance.
std::string config_digest(const model::ExperimentConfig& config);

}  // namespace asymdet::config
