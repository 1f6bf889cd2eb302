#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "volterra/kernel.hpp"

namespace volterra {

// Canonical document {kind, k, alpha, params, children}; parsing the
// canonical dump and dumping again is byte-identical.
nlohmann::ordered_json kernel_to_json(const Kernel& kernel);
Kernel kernel_from_json(const nlohmann::ordered_json& doc);

std::string kernel_to_string(const Kernel& kernel);
Kernel kernel_from_string(const std::string& text);

}  // namespace volterra
