#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace volterra {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceSummary {
    std::vector<CriterionResult> results;
    bool all_passed() const {
        for (const auto& r : results)
            if (!r.passed) return false;
        return !results.empty();
    }
};

// Tolerance manifest: every threshold and golden value driving pass/fail
// lives in this JSON document, never in code.
nlohmann::json load_manifest(const std::string& path);

// Runs criterion `id` (1..11) against the manifest; `quick` shrinks the
// Monte Carlo sizes by the manifest's quick factors where provided.
CriterionResult run_criterion(int id, const nlohmann::json& manifest);

// All criteria in order; `only` restricts to a subset when non-empty.
AcceptanceSummary run_acceptance(const nlohmann::json& manifest,
                                 const std::vector<int>& only = {});

}  // namespace volterra
