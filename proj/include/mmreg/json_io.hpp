#pragma once

#include <json.hpp>

#include "mmreg/diagnostics.hpp"
#include "mmreg/mm_estimator.hpp"
#include "mmreg/simulation.hpp"

namespace mmreg {

inline constexpr int kSchemaVersion = 1;

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json fit_result_to_json(const FitResult& fit);
FitResult fit_result_from_json(const nlohmann::json& j);

nlohmann::json simulation_report_to_json(const SimulationReport& report);
nlohmann::json cv_report_to_json(const CVReport& report);

}  // namespace mmreg
