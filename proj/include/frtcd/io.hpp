#pragma once

#include "frtcd/combine.hpp"
#include "frtcd/design.hpp"
#include "frtcd/inversion.hpp"
#include "frtcd/mc_planner.hpp"
#include "frtcd/randomization.hpp"
#include "frtcd/simulation.hpp"
#include "frtcd/statistics.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace frtcd {

/// A parsed experiment CSV: header with unit_id, w, y and an optional block
/// column. Units are regrouped so each block is contiguous, blocks in order
/// of first appearance, file order kept within a block.
struct experiment_file {
    observed_data data;
    bool has_blocks = false;
    std::vector<std::string> block_of_unit;  // after regrouping
    std::vector<std::string> block_names;    // in design order
    design inferred = design::completely_randomized(2, 1);
};

experiment_file parse_experiment_csv(std::istream& in, const std::string& source = "<stream>");
experiment_file read_experiment_csv(const std::string& path);
void write_experiment_csv(std::ostream& out, const experiment_file& file);

/// "CRD(N,N1)", "RBD[(k,t),(k,t),...]" (spaces and case ignored), or
/// "blocks(b,k)" for b blocks of size k with k/2 treated.
design parse_design(const std::string& text);

/// The declared design if given (checked against the file), else the one
/// inferred from the file's columns.
design resolve_design(const experiment_file& file, const std::optional<std::string>& declared);

/// 12 significant digits; infinities as "inf" / "-inf".
std::string format_number(double x);
/// JSON number rounded to 12 significant digits, or the strings "inf"/"-inf".
nlohmann::json json_number(double x);
double number_from_json(const nlohmann::json& j);

nlohmann::json to_json(const confidence_interval& ci);
nlohmann::json to_json(const pvalue_step_function& f);
nlohmann::json to_json(const scenario_result& r);
nlohmann::json to_json(const scenario_config& c);
nlohmann::json to_json(const audit_report& r);
scenario_config scenario_from_json(const nlohmann::json& j);
scenario_config read_scenario(const std::string& path);

}  // namespace frtcd
