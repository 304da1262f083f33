#ifndef PMHE_SCENARIO_HPP
#define PMHE_SCENARIO_HPP

#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pmhe/design.hpp"
#include "pmhe/estimators.hpp"
#include "pmhe/regret.hpp"
#include "pmhe/types.hpp"

namespace pmhe {

enum class EstimatorKind { kAnytime, kOptimal, kWarmConstant, kGmhe, kLuenberger };
enum class MeasurementSource { kSimulate, kCsv };
enum class ComparatorChoice { kTrueStates, kLuenberger };
enum class OutputFormat { kCsv, kCsvSvg };

// Full description of one simulation run. parse() reads the flat dotted
// key=value config format (matrices row-major with ';' between rows);
// builtin_reactor() is the batch-reactor benchmark configuration.
struct Scenario {
    std::string label = "scenario";

    Mat A, B, C;
    Mat Cx;
    Vec dx;
    int N = 2;

    Mat R;   // output-residual weight, p x p
    Mat Qw;  // model-residual weight, n x n (ignored when residuals fixed)
    bool residuals_fixed = true;

    std::vector<std::complex<double>> poles;  // used when L not given
    std::optional<Mat> L;
    std::optional<Mat> P_override;  // default: Stein-equation solution
    std::optional<Mat> Q_override;  // default I
    std::optional<Mat> W_override;  // default I (Nn x Nn)
    SmoothnessMode smoothness = SmoothnessMode::kClosedFormBound;

    EstimatorKind estimator = EstimatorKind::kAnytime;
    std::vector<int> it_budget{20};
    JSelect jselect = JSelect::kLastIterate;
    ScheduleKind schedule = ScheduleKind::kConstant;
    bool bound_mode = true;
    double gmhe_step = -1.0;  // < 0: use the certificate step bound
    bool gmhe_luenberger = false;

    Vec x0_true, x0_hat;
    int T_sim = 100;
    unsigned long long seed = 1;
    double noise_std = 0.0;
    MeasurementSource source = MeasurementSource::kSimulate;
    std::string csv_path;

    ComparatorChoice comparator = ComparatorChoice::kTrueStates;
    std::vector<std::complex<double>> comparator_poles;
    std::optional<Vec> comparator_x0;

    static Scenario builtin_reactor();
    static Scenario parse(std::istream& is, const std::string& label = "scenario");
    static Scenario parse_file(const std::string& path);

    // Throws ConfigError listing every offending key.
    void validate() const;
};

// Certificate synthesis for a scenario: gain from the pole set (or as
// given), P from the Stein equation, constants from the window problem.
struct ScenarioDesign {
    StabilityCertificate cert;
    StageWeights weights;
};
ScenarioDesign design_scenario(const Scenario& sc, const LtiSystem& sys);

struct ScenarioResult {
    EstimateTrace trace;
    RegretReport report;
    StabilityCertificate cert;
    std::vector<Vec> x_true;  // x_0 .. x_{T+N+1}
    double rmse_value = 0.0;
    std::vector<std::string> files_written;
};

// Runs the configured estimator over the measurement stream, attaches the
// true trajectory to the trace, assembles the regret report, and writes
// <label>_trace.csv, <label>_regret.csv and the two SVG plots to out_dir.
// Deterministic for a fixed seed, byte-for-byte in the CSV output.
ScenarioResult run_scenario(const Scenario& sc, const std::string& out_dir,
                            OutputFormat format = OutputFormat::kCsvSvg);

struct CompareRow {
    std::string label;
    double rmse = 0.0;
    double final_err = 0.0;
    double regret_T = 0.0;
    std::optional<double> bound2, bound3, bound4;
};

struct CompareTable {
    std::vector<CompareRow> rows;
    std::string format() const;
};

// Runs several scenarios that must share the system, seed, initial truth and
// measurement source (enforced; ConfigError otherwise) and tabulates them.
CompareTable compare_estimators(const std::vector<Scenario>& scenarios,
                                const std::string& out_dir, OutputFormat format);

}  // namespace pmhe

#endif  // PMHE_SCENARIO_HPP
