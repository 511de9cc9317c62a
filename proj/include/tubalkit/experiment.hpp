#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tubalkit/solvers.hpp"
#include "tubalkit/tensor.hpp"

namespace tubalkit {

enum class ProblemKind { Completion, Rpca };
enum class SolverKind { Pgd, Fista, Rfgm, Eg };

std::string to_string(ProblemKind kind);
std::string to_string(SolverKind kind);

struct ExperimentConfig {
    ProblemKind problem = ProblemKind::Completion;
    Dims dims{50, 50, 50};
    std::size_t r = 2;
    // Observation probability (completion).
    double rho = 0.6;
    // Per-entry noise density (rpca).
    double m = 0.05;
    // Entry standard deviation of the rpca factors: inv_sqrt_n, inv_n or a number.
    std::string factor_sd = "inv_sqrt_n";
    double tau_fraction = 0.7;
    SolverKind solver = SolverKind::Fista;
    // Unset means the solver's automatic rule.
    std::optional<double> step = 1.0;
    std::size_t iterations = 800;
    ProjectionKind projection = ProjectionKind::TruncatedCertified;
    std::size_t proj_rank = 2;
    std::size_t restart = 50;
    std::size_t gap_every = 10;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    // Directory for runs.csv and trace files; empty writes nothing.
    std::string output = "tubalkit-out";

    static ExperimentConfig defaults(ProblemKind kind);
    void validate() const;
    double resolved_factor_sd() const;
};

// One key=value pair plus where it came from, for error messages.
struct Setting {
    std::string key;
    std::string value;
    std::string origin;
};

std::vector<Setting> parse_config_text(const std::string& text, const std::string& source);
std::vector<Setting> read_config_file(const std::string& path);

// Starts from the defaults of the last `problem` setting and applies every
// setting in order, so later ones win.
ExperimentConfig build_config(const std::vector<Setting>& settings);
void apply_setting(ExperimentConfig& cfg, const Setting& s);

std::vector<std::string> config_keys();

struct TracePoint {
    std::size_t iteration = 0;
    // f(X_t) - f(X_T) for completion, primal value of the ergodic average for rpca.
    double objective_gap_or_value = 0.0;
    double recovery_error = 0.0;
};

struct RunRecord {
    std::uint64_t seed = 0;
    double init_error = 0.0;
    double recovery_error = 0.0;
    double dual_gap = 0.0;
    double sc_measure = 0.0;
    std::optional<std::size_t> first_certified_iteration;
    double wall_time = 0.0;
    std::size_t escalations = 0;
    std::vector<TracePoint> trace;
};

struct ExperimentSummary {
    std::vector<RunRecord> runs;
    double init_error = 0.0;
    double recovery_error = 0.0;
    double dual_gap = 0.0;
    double sc_measure = 0.0;
    // NaN when some run never certified.
    double first_certified_iteration = 0.0;
    double wall_time = 0.0;
    double escalations = 0.0;
};

RunRecord run_seed(const ExperimentConfig& cfg, std::uint64_t seed);
ExperimentSummary summarize(std::vector<RunRecord> runs);
ExperimentSummary run_experiment(const ExperimentConfig& cfg);

inline constexpr const char* kCsvHeader = "# tubalkit-csv v1";

void write_runs_csv(const std::string& path, const ExperimentSummary& summary);
void write_trace_csv(const std::string& path, const RunRecord& run);

}  // namespace tubalkit
