#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "affcredit/io.hpp"

namespace affcredit::cli {

struct GlobalOptions {
    double tol = 1e-9;
    std::uint64_t seed = 42;
    int threads = 1;
    std::string output_dir;
};

/// Output of one task: CSV or JSON text plus optional side files (name, bytes).
struct Artifact {
    std::string extension;
    std::string content;
    std::vector<std::pair<std::string, std::string>> side_files;
};

/// Full report over every admissibility, premium and drift clause; throws ValidationError when
/// any clause fails, otherwise returns the JSON summary.
nlohmann::json validate_document(const nlohmann::json& root);

/// Runs one task of the given kind against a loaded model. `root` is the model document, needed
/// only by "validate".
Artifact run_task(const std::string& kind, const nlohmann::json& params, const nlohmann::json& root,
                  const io::LoadedModel& model, const GlobalOptions& g);
Artifact run_task(const std::string& kind, const nlohmann::json& params, const io::LoadedModel& model,
                  const GlobalOptions& g);

/// Runs a scenario file, writing `<kind>_<index>.csv|json` into `output_dir`.
void run_scenario(const std::string& scenario_path, const GlobalOptions& g, std::ostream& log);

/// Entry point: 0 success, 1 numerical failure, 2 input error.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace affcredit::cli
