#pragma once

#include <cmath>

#include <nlohmann/json.hpp>

#include "dlmvar/adjust.hpp"
#include "dlmvar/model.hpp"

namespace dlmvar {

/// JSON form of an adjustment result (schema_version 1). Key order is fixed
/// so serialized reports are byte-stable.
inline nlohmann::ordered_json adjustment_to_json(const AdjustmentResult& a,
                                                 const PriorSpec& spec) {
    nlohmann::ordered_json out;
    out["schema_version"] = 1;
    out["N"] = a.N;
    out["adjusted_mean"] = {a.adjusted_mean(0), a.adjusted_mean(1), a.adjusted_mean(2)};
    nlohmann::ordered_json var_rows = nlohmann::ordered_json::array();
    for (int i = 0; i < 3; ++i)
        var_rows.push_back({a.adjusted_var(i, 0), a.adjusted_var(i, 1), a.adjusted_var(i, 2)});
    out["adjusted_var"] = var_rows;
    out["resolution"] = {a.resolution(0), a.resolution(1), a.resolution(2)};
    out["diagnostics"] = {a.diagnostics(0), a.diagnostics(1), a.diagnostics(2)};
    out["diagnostic_flagged"] = {std::abs(a.diagnostics(0)) > 2.0,
                                 std::abs(a.diagnostics(1)) > 2.0,
                                 std::abs(a.diagnostics(2)) > 2.0};
    out["rank_used"] = a.rank_used;
    out["min_var_D_eigenvalue"] = a.min_var_D_eigenvalue;
    out["negative_mean_warning"] = a.negative_mean_warning;
    out["prior"] = {{"mean_V", {spec.mean_V[0], spec.mean_V[1], spec.mean_V[2]}},
                    {"var_V", {spec.var_V[0], spec.var_V[1], spec.var_V[2]}},
                    {"var_S", {spec.var_S[0], spec.var_S[1], spec.var_S[2]}}};
    return out;
}

}  // namespace dlmvar
