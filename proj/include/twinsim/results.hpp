#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "twinsim/scenario.hpp"

namespace twinsim {

// One sweep entry: either a finished run or a recorded failure.
struct RunOutcome {
  ScenarioConfig config;
  std::optional<ResultSet> result;  // empty on failure
  std::string error;
};

const std::string& flows_csv_header();
const std::string& aggregates_csv_header();

std::string flows_csv(const std::vector<RunOutcome>& outcomes);
std::string aggregates_csv(const std::vector<RunOutcome>& outcomes);
std::string manifest_json(const std::vector<RunOutcome>& outcomes);

// Writes flows.csv, aggregates.csv, and manifest.json under `dir`.
// Returns the number of failed runs recorded in the manifest.
int write_results(const std::filesystem::path& dir,
                  const std::vector<RunOutcome>& outcomes);

}  // namespace twinsim
