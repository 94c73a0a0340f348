#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "qgnls/solvers.hpp"
#include "qgnls/spectral.hpp"
#include "qgnls/sweep.hpp"

namespace qgnls {

// Non-finite values become null.
nlohmann::json json_number(double v);

nlohmann::json to_json(const FunctionalReport& r);
nlohmann::json to_json(const MetricGraph& g, const PeakInfo& pk);
nlohmann::json to_json(const LineFit& fit);
nlohmann::json to_json(const SolutionRecord& rec);
nlohmann::json to_json(const PeakedRecord& rec);
nlohmann::json to_json(const SweepEntry& entry);
nlohmann::json to_json(const SweepReport& report);
nlohmann::json to_json(const EigenReport& report, double kernel_tol);

// Keys every serialized object carries; checked by the schema tests.
const std::vector<std::string>& solution_record_fields();
const std::vector<std::string>& peaked_record_fields();
const std::vector<std::string>& sweep_entry_fields();
const std::vector<std::string>& sweep_report_fields();
const std::vector<std::string>& eigen_report_fields();

// One row per λ: lambda,J,mass_sq,peak_vertex,profile_error,c2_hat,correction_norm,residual_R,status
void write_sweep_csv(std::ostream& out, const SweepReport& report);

// Two-column "lambda value" files, one per observable; returns the files written.
std::vector<std::filesystem::path> write_observable_tables(const std::filesystem::path& dir, const SweepReport& report);

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);
void write_solution_csv(const std::filesystem::path& path, const DiscreteFunction& u);
std::string solution_file_name(double lambda);

}  // namespace qgnls
