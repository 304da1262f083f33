#include "pmhe/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "pmhe/report.hpp"

namespace pmhe {

namespace {

// ---------------------------------------------------------------------------
// Config text helpers
// ---------------------------------------------------------------------------

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_row(const std::string& s) {
    std::istringstream is(s);
    std::vector<double> out;
    double v;
    while (is >> v) out.push_back(v);
    if (!is.eof()) throw ConfigError("bad numeric row: '" + s + "'");
    return out;
}

Mat parse_matrix(const std::string& s) {
    std::vector<std::vector<double>> rows;
    std::string part;
    std::istringstream is(s);
    while (std::getline(is, part, ';')) rows.push_back(parse_row(part));
    if (rows.empty() || rows[0].empty()) throw ConfigError("empty matrix literal");
    Mat M(rows.size(), rows[0].size());
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size()) throw ConfigError("ragged matrix literal");
        for (size_t j = 0; j < rows[i].size(); ++j) M(i, j) = rows[i][j];
    }
    return M;
}

Vec parse_vector(const std::string& s) {
    const Mat M = parse_matrix(s);
    if (M.rows() == 1) return M.row(0).transpose();
    if (M.cols() == 1) return M.col(0);
    throw ConfigError("expected a vector literal: '" + s + "'");
}

// Poles: whitespace-separated entries, each "a" or "a+bi" / "a-bi".
std::vector<std::complex<double>> parse_poles(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::complex<double>> out;
    std::string tok;
    while (is >> tok) {
        const auto ipos = tok.find('i');
        if (ipos == std::string::npos) {
            out.emplace_back(std::stod(tok), 0.0);
            continue;
        }
        size_t split = tok.find_last_of("+-");
        if (split == std::string::npos || split == 0)
            throw ConfigError("bad complex pole: '" + tok + "'");
        out.emplace_back(std::stod(tok.substr(0, split)), std::stod(tok.substr(split, ipos - split)));
    }
    return out;
}

const std::set<std::string> kKnownKeys = {
    "system.kind", "system.A", "system.B", "system.C",
    "constraints.Cx", "constraints.dx",
    "horizon.N",
    "weights.R", "weights.qw",
    "design.poles", "design.L", "design.P", "design.Q", "design.W", "design.smoothness",
    "estimator.kind", "estimator.it", "estimator.jselect",
    "estimator.gmhe_step", "estimator.gmhe_luenberger",
    "schedule.kind", "schedule.bound_mode",
    "init.x0_true", "init.x0_hat",
    "sim.T", "sim.seed", "sim.noise_std",
    "measurements.source",
    "comparator.kind", "comparator.poles", "comparator.x0",
    "label",
};

// ---------------------------------------------------------------------------
// Deterministic RNG: explicit Box-Muller over mt19937_64 so the byte stream
// does not depend on the standard library's distribution implementations.
// ---------------------------------------------------------------------------

class Rng {
public:
    explicit Rng(unsigned long long seed) : gen_(seed) {}
    double uniform() {
        return (gen_() >> 11) * (1.0 / 9007199254740992.0);  // [0,1) with 53 bits
    }
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

Scenario Scenario::builtin_reactor() {
    Scenario sc;
    sc.label = "reactor";
    sc.A = Mat(3, 3);
    sc.A << 0.8831, 0.0078, 0.0022,
            0.1150, 0.9563, 0.0028,
            0.1178, 0.0102, 0.9954;
    sc.B = Mat::Zero(3, 1);
    sc.C = Mat(1, 3);
    sc.C << 32.84, 32.84, 32.84;
    sc.Cx = -Mat::Identity(3, 3);  // x >= 0
    sc.dx = Vec::Zero(3);
    sc.N = 2;
    sc.R = Mat::Constant(1, 1, 0.01);
    sc.Qw = Mat::Zero(3, 3);
    sc.residuals_fixed = true;
    sc.poles = {{0.4754, 0.0}, {0.8497, 0.0}, {0.9727, 0.0}};
    sc.T_sim = 100;
    // The source text never prints the initial conditions; these defaults are
    // ours: feasible, nonzero initial error.
    sc.x0_true = Vec(3);
    sc.x0_true << 1.0, 0.5, 2.0;
    sc.x0_hat = Vec::Zero(3);
    return sc;
}

Scenario Scenario::parse(std::istream& is, const std::string& label) {
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line without '=': " + line);
        const std::string key = trim(line.substr(0, eq));
        if (!kKnownKeys.count(key)) throw ConfigError("unknown config key: " + key);
        kv[key] = trim(line.substr(eq + 1));
    }

    Scenario sc;
    const auto get = [&](const char* key) -> std::optional<std::string> {
        const auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        return it->second;
    };

    if (get("system.kind").value_or("inline") == "reactor") sc = builtin_reactor();
    sc.label = get("label").value_or(label);

    if (auto v = get("system.A")) sc.A = parse_matrix(*v);
    if (auto v = get("system.B")) sc.B = parse_matrix(*v);
    if (auto v = get("system.C")) sc.C = parse_matrix(*v);
    if (auto v = get("constraints.Cx")) sc.Cx = parse_matrix(*v);
    if (auto v = get("constraints.dx")) sc.dx = parse_vector(*v);
    if (auto v = get("horizon.N")) sc.N = std::stoi(*v);
    if (auto v = get("weights.R")) sc.R = parse_matrix(*v);
    if (auto v = get("weights.qw")) {
        if (*v == "fixed") {
            sc.residuals_fixed = true;
        } else {
            sc.residuals_fixed = false;
            sc.Qw = parse_matrix(*v);
        }
    }
    if (auto v = get("design.poles")) sc.poles = parse_poles(*v);
    if (auto v = get("design.L")) sc.L = parse_matrix(*v);
    if (auto v = get("design.P")) sc.P_override = parse_matrix(*v);
    if (auto v = get("design.Q")) sc.Q_override = parse_matrix(*v);
    if (auto v = get("design.W")) sc.W_override = parse_matrix(*v);
    if (auto v = get("design.smoothness"))
        sc.smoothness = *v == "hessian" ? SmoothnessMode::kHessian : SmoothnessMode::kClosedFormBound;
    if (auto v = get("estimator.kind")) {
        if (*v == "anytime") sc.estimator = EstimatorKind::kAnytime;
        else if (*v == "optimal") sc.estimator = EstimatorKind::kOptimal;
        else if (*v == "warmConstant") sc.estimator = EstimatorKind::kWarmConstant;
        else if (*v == "gmhe") sc.estimator = EstimatorKind::kGmhe;
        else if (*v == "luenberger") sc.estimator = EstimatorKind::kLuenberger;
        else throw ConfigError("estimator.kind: unknown value '" + *v + "'");
    }
    if (auto v = get("estimator.it")) {
        sc.it_budget.clear();
        std::istringstream bs(*v);
        int b;
        while (bs >> b) sc.it_budget.push_back(b);
        if (sc.it_budget.empty()) throw ConfigError("estimator.it: empty");
    }
    if (auto v = get("estimator.jselect"))
        sc.jselect = *v == "minLoss" ? JSelect::kMinLoss : JSelect::kLastIterate;
    if (auto v = get("estimator.gmhe_step")) sc.gmhe_step = *v == "pmhe" ? -1.0 : std::stod(*v);
    if (auto v = get("estimator.gmhe_luenberger")) sc.gmhe_luenberger = (*v == "true" || *v == "1");
    if (auto v = get("schedule.kind"))
        sc.schedule = *v == "inverseSqrt" ? ScheduleKind::kInverseSqrt : ScheduleKind::kConstant;
    if (auto v = get("schedule.bound_mode")) sc.bound_mode = (*v == "true" || *v == "1");
    if (auto v = get("init.x0_true")) sc.x0_true = parse_vector(*v);
    if (auto v = get("init.x0_hat")) sc.x0_hat = parse_vector(*v);
    if (auto v = get("sim.T")) sc.T_sim = std::stoi(*v);
    if (auto v = get("sim.seed")) sc.seed = std::stoull(*v);
    if (auto v = get("sim.noise_std")) sc.noise_std = std::stod(*v);
    if (auto v = get("measurements.source")) {
        if (*v == "simulate") {
            sc.source = MeasurementSource::kSimulate;
        } else if (v->rfind("csv:", 0) == 0) {
            sc.source = MeasurementSource::kCsv;
            sc.csv_path = v->substr(4);
        } else {
            throw ConfigError("measurements.source: expected 'simulate' or 'csv:<path>'");
        }
    }
    if (auto v = get("comparator.kind"))
        sc.comparator = *v == "luenberger" ? ComparatorChoice::kLuenberger
                                           : ComparatorChoice::kTrueStates;
    if (auto v = get("comparator.poles")) sc.comparator_poles = parse_poles(*v);
    if (auto v = get("comparator.x0")) sc.comparator_x0 = parse_vector(*v);
    return sc;
}

Scenario Scenario::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::string label = std::filesystem::path(path).stem().string();
    return parse(is, label);
}

void Scenario::validate() const {
    std::vector<std::string> bad;
    if (A.rows() == 0 || A.rows() != A.cols()) bad.push_back("system.A");
    const int n = static_cast<int>(A.rows());
    if (B.rows() != n) bad.push_back("system.B");
    if (C.cols() != n || C.rows() == 0) bad.push_back("system.C");
    if (Cx.cols() != n || Cx.rows() == 0 || Cx.rows() != dx.size()) bad.push_back("constraints.Cx");
    if (N < 1) bad.push_back("horizon.N");
    const bool r_scalar = R.rows() == 1 && R.cols() == 1;
    if (!r_scalar && (R.rows() != C.rows() || R.rows() != R.cols())) bad.push_back("weights.R");
    const bool qw_scalar = Qw.rows() == 1 && Qw.cols() == 1;
    if (!residuals_fixed && !qw_scalar && (Qw.rows() != n || Qw.cols() != n))
        bad.push_back("weights.qw");
    if (!L && static_cast<int>(poles.size()) != n) bad.push_back("design.poles");
    if (x0_true.size() != n && source == MeasurementSource::kSimulate) bad.push_back("init.x0_true");
    if (x0_hat.size() != n) bad.push_back("init.x0_hat");
    if (T_sim < 1) bad.push_back("sim.T");
    if (it_budget.empty()) bad.push_back("estimator.it");
    for (int b : it_budget)
        if (b < 0) bad.push_back("estimator.it");
    if (source == MeasurementSource::kCsv && csv_path.empty()) bad.push_back("measurements.source");
    if (comparator == ComparatorChoice::kLuenberger && !comparator_poles.empty() &&
        comparator_poles.size() != static_cast<size_t>(n))
        bad.push_back("comparator.poles");
    if (!bad.empty()) {
        std::string msg = "scenario validation failed, offending keys:";
        std::sort(bad.begin(), bad.end());
        bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
        for (const auto& k : bad) msg += " " + k;
        throw ConfigError(msg);
    }
}

// ---------------------------------------------------------------------------
// Design synthesis
// ---------------------------------------------------------------------------

namespace {

// Scalar config entries stand for multiples of the identity.
Mat broadcast(const Mat& M, int dim) {
    if (M.rows() == 1 && M.cols() == 1 && dim > 1) return M(0, 0) * Mat::Identity(dim, dim);
    return M;
}

}  // namespace

ScenarioDesign design_scenario(const Scenario& sc, const LtiSystem& sys) {
    const int n = sys.n();

    StageWeights weights;
    weights.R = broadcast(sc.R, sys.p());
    weights.Qw = sc.residuals_fixed ? Mat::Zero(n, n) : broadcast(sc.Qw, n);
    weights.residuals_fixed = sc.residuals_fixed;

    const Mat L = sc.L ? *sc.L : place_gain(sys, sc.poles);
    const Mat Q = sc.Q_override ? broadcast(*sc.Q_override, n) : Mat::Identity(n, n);
    const Mat P = sc.P_override ? broadcast(*sc.P_override, n) : solve_lmi(sys, L, Q);
    const Mat W = sc.W_override ? broadcast(*sc.W_override, sc.N * n)
                                : Mat::Identity(sc.N * n, sc.N * n);

    // The window loss data (Hessian, observability rows) does not depend on
    // the measurement values, so a zero-filled window yields the exact
    // constants for the full-horizon problem.
    MeasurementWindow scratch(sys.p(), sys.m(), sc.N);
    for (int t = 0; t < sc.N; ++t) scratch.push(Vec::Zero(sys.p()), Vec::Zero(sys.m()));
    const CondensedProblem prob = build_condensed(sys, scratch, sc.N, weights);

    return {certify(sys, L, P, W, Q, prob, sc.smoothness), weights};
}

// ---------------------------------------------------------------------------
// run_scenario
// ---------------------------------------------------------------------------

namespace {

struct Stream {
    std::vector<Vec> ys, us;
    std::vector<Vec> xs;  // truth; empty for file-sourced measurements
};

Stream make_stream(const Scenario& sc, const LtiSystem& sys) {
    Stream st;
    const int extra = sc.N + 2;  // comparators need heads one step past T
    if (sc.source == MeasurementSource::kSimulate) {
        Rng rng(sc.seed);
        Vec x = sc.x0_true;
        st.xs.push_back(x);
        for (int t = 0; t < sc.T_sim + extra; ++t) {
            Vec y = sys.C() * x;
            if (sc.noise_std > 0.0)
                for (int i = 0; i < y.size(); ++i) y(i) += sc.noise_std * rng.normal();
            st.ys.push_back(y);
            st.us.push_back(Vec::Zero(sys.m()));
            x = sys.A() * x + sys.B() * st.us.back();
            st.xs.push_back(x);
        }
        return st;
    }
    std::ifstream is(sc.csv_path);
    if (!is) throw ConfigError("cannot open measurement csv: " + sc.csv_path);
    std::string line;
    std::getline(is, line);  // header
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        const std::vector<double> row = parse_row(line);
        if (static_cast<int>(row.size()) != sys.p() + sys.m())
            throw ConfigError("measurement csv row has wrong arity");
        st.ys.push_back(Eigen::Map<const Vec>(row.data(), sys.p()));
        st.us.push_back(Eigen::Map<const Vec>(row.data() + sys.p(), sys.m()));
    }
    if (static_cast<int>(st.ys.size()) < sc.T_sim)
        throw ConfigError("measurement csv shorter than sim.T");
    return st;
}

std::unique_ptr<Estimator> make_estimator(const Scenario& sc, const LtiSystem& sys,
                                          const ScenarioDesign& design) {
    const auto require_valid = [&] {
        if (!design.cert.valid)
            throw DesignError("certificate invalid (LMI margin = " +
                              std::to_string(design.cert.lmi_margin) + ")");
    };
    switch (sc.estimator) {
        case EstimatorKind::kAnytime:
        case EstimatorKind::kWarmConstant: {
            require_valid();
            StepSchedule sched =
                make_schedule(design.cert, sc.schedule, sc.it_budget, sc.bound_mode);
            AnytimeOptions opt;
            opt.jselect = sc.jselect;
            opt.warm_constant_centering = sc.estimator == EstimatorKind::kWarmConstant;
            return std::make_unique<AnytimeEstimator>(sys, sc.Cx, sc.dx, sc.N, design.weights,
                                                      design.cert, std::move(sched), sc.x0_hat,
                                                      opt);
        }
        case EstimatorKind::kOptimal:
            require_valid();
            return std::make_unique<OptimalPmheEstimator>(sys, sc.Cx, sc.dx, sc.N,
                                                          design.weights, design.cert, sc.x0_hat);
        case EstimatorKind::kGmhe: {
            GmheOptions opt;
            if (sc.gmhe_luenberger) opt.luenberger_gain = design.cert.L;
            opt.step_size = sc.gmhe_step < 0.0 ? design.cert.step_bound() : sc.gmhe_step;
            opt.iterations = sc.it_budget.front();
            return std::make_unique<GmheEstimator>(sys, sc.Cx, sc.dx, sc.N, design.weights, opt,
                                                   sc.x0_hat);
        }
        case EstimatorKind::kLuenberger:
            return std::make_unique<LuenbergerEstimator>(sys, design.cert.L, sc.x0_hat);
    }
    throw ConfigError("unreachable estimator kind");
}

ComparatorSequence make_comparator(const Scenario& sc, const LtiSystem& sys,
                                   const ScenarioDesign& design, const Stream& st, int count) {
    if (sc.comparator == ComparatorChoice::kTrueStates) {
        if (st.xs.empty())
            throw ConfigError("true-state comparator needs simulated measurements");
        return ComparatorSequence::true_states(st.xs, sc.N, count);
    }
    const Mat Lc = sc.comparator_poles.empty() ? design.cert.L
                                               : place_gain(sys, sc.comparator_poles);
    const Vec xc0 = sc.comparator_x0 ? *sc.comparator_x0 : sc.x0_hat;
    const BregmanGeometry euclid = BregmanGeometry::state_quadratic(Mat::Identity(sys.n(), sys.n()));
    PolytopeSet state_set;
    state_set.G = sc.Cx;
    state_set.F = Mat::Zero(sc.Cx.rows(), 0);
    state_set.E = sc.dx;
    state_set.n = sys.n();
    state_set.horizon = 0;
    state_set.qx = static_cast<int>(sc.Cx.rows());

    // Observer recursion with a Euclidean projection onto the state set; the
    // projection is nonexpansive so the GES property survives it.
    std::vector<Vec> heads;
    Vec xc = project(euclid, StackedVector::from_head(xc0, 0), state_set).head();
    heads.push_back(xc);
    for (int t = 0; t < count; ++t) {
        Vec next = sys.A() * xc + sys.B() * st.us[t] + Lc * (st.ys[t] - sys.C() * xc);
        xc = project(euclid, StackedVector::from_head(next, 0), state_set).head();
        heads.push_back(xc);
    }
    ComparatorSequence comp =
        ComparatorSequence::from_heads(heads, sc.N, count, ComparatorKind::kGesEstimator);
    if (!st.xs.empty()) fit_ges_parameters(comp, st.xs, sc.N, count);
    return comp;
}

}  // namespace

ScenarioResult run_scenario(const Scenario& sc, const std::string& out_dir,
                            OutputFormat format) {
    sc.validate();
    const LtiSystem sys(sc.A, sc.B, sc.C);
    const ScenarioDesign design = design_scenario(sc, sys);
    const Stream stream = make_stream(sc, sys);

    std::unique_ptr<Estimator> est = make_estimator(sc, sys, design);
    const bool has_geom = sc.estimator == EstimatorKind::kAnytime ||
                          sc.estimator == EstimatorKind::kWarmConstant ||
                          sc.estimator == EstimatorKind::kOptimal;
    std::optional<BregmanGeometry> geom;
    if (has_geom) geom = design.cert.geometry();

    for (int t = 0; t < sc.T_sim; ++t) {
        const TraceRecord& rec = est->step(stream.ys[t], stream.us[t]);
        if (!stream.xs.empty()) {
            TraceRecord& mrec = est->mutable_trace().records.back();
            const int k = rec.k;
            const int t0 = k - rec.ell;
            mrec.has_truth = true;
            mrec.x_true = stream.xs[k];
            mrec.x_true_head = stream.xs[t0];
            mrec.err_cur = (stream.xs[k] - mrec.xhat).norm();
            mrec.err_head = (stream.xs[t0] - mrec.head_estimate).norm();
            if (geom && !mrec.iterates.empty()) {
                const StackedVector z_true = StackedVector::from_head(stream.xs[t0], mrec.ell);
                mrec.dpsi = geom->distance(z_true, mrec.iterates[mrec.j_selected]);
            }
        }
    }

    ScenarioResult result;
    result.trace = est->trace();
    result.cert = design.cert;
    result.x_true = stream.xs;

    // Regret accounting (skipped for file-sourced streams without truth when
    // the comparator needs it).
    const bool can_compare =
        sc.comparator == ComparatorChoice::kLuenberger || !stream.xs.empty();
    if (can_compare) {
        const ComparatorSequence comp =
            make_comparator(sc, sys, design, stream, sc.T_sim + 1);
        const auto problems =
            replay_problems(sys, result.trace.ys, result.trace.us, sc.N, design.weights);
        const auto sets =
            replay_polytopes(sys, sc.Cx, sc.dx, result.trace.ys, result.trace.us, sc.N);
        result.report.R = regret_series(result.trace, comp, problems, &sets);
        result.report.avgR.resize(result.report.R.size());
        for (size_t i = 0; i < result.report.R.size(); ++i)
            result.report.avgR[i] = result.report.R[i] / static_cast<double>(i + 1);
        result.report.C = comparator_variation(comp, sys, design.cert.L, stream.ys, stream.us,
                                               sc.N, sc.T_sim);
        if (geom) {
            result.report.constants = empirical_constants(result.trace, problems, *geom, sys,
                                                          design.cert.L, sc.N, &comp);
            if (sc.estimator == EstimatorKind::kAnytime && design.cert.valid) {
                StepSchedule sched =
                    make_schedule(design.cert, sc.schedule, sc.it_budget, sc.bound_mode);
                const auto& ec = result.report.constants;
                for (int T = 1; T <= sc.T_sim; ++T) {
                    try {
                        result.report.bound3.push_back(regret_bound_sqrt_schedule(
                            design.cert, sched, ec.Dmax, ec.M, result.report.C[T - 1], T));
                    } catch (const ConfigError&) {
                        result.report.bound3.clear();
                        break;
                    }
                }
                for (int T = 1; T <= sc.T_sim; ++T) {
                    try {
                        result.report.bound2.push_back(
                            regret_bound_general(design.cert, sched, ec.Gf, ec.Dmax, ec.M,
                                                 result.report.C[T - 1], T));
                    } catch (const ConfigError&) {
                        result.report.bound2.clear();
                        break;
                    }
                }
                if (comp.kind == ComparatorKind::kGesEstimator && !stream.xs.empty()) {
                    try {
                        const double b4 = regret_bound_ges_comparator(
                            design.cert, comp, StackedVector::from_head(stream.xs[0], 0),
                            StackedVector::from_head(sc.x0_hat, 0));
                        result.report.bound4.assign(sc.T_sim, b4);
                    } catch (const ConfigError&) {
                    }
                }
            }
        }
    }

    if (!stream.xs.empty() && sc.N <= sc.T_sim) result.rmse_value = rmse(result.trace, sc.N, sc.T_sim);

    std::filesystem::create_directories(out_dir);
    const auto path = [&](const std::string& suffix) {
        return (std::filesystem::path(out_dir) / (sc.label + suffix)).string();
    };
    {
        std::ofstream os(path("_trace.csv"));
        write_trace_csv(os, result.trace, sys.n());
        result.files_written.push_back(path("_trace.csv"));
    }
    if (can_compare) {
        std::ofstream os(path("_regret.csv"));
        result.report.write_csv(os);
        result.files_written.push_back(path("_regret.csv"));
    }
    if (format == OutputFormat::kCsvSvg) {
        std::vector<double> errs;
        for (const auto& rec : result.trace.records)
            errs.push_back(rec.has_truth ? rec.err_head : 0.0);
        {
            std::ofstream os(path("_error.svg"));
            write_line_svg(os, errs, "estimation error |e_k| vs k", true);
            result.files_written.push_back(path("_error.svg"));
        }
        if (!result.report.R.empty()) {
            std::ofstream os(path("_regret.svg"));
            write_line_svg(os, result.report.R, "regret R(T) vs T", false);
            result.files_written.push_back(path("_regret.svg"));
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// compare_estimators
// ---------------------------------------------------------------------------

CompareTable compare_estimators(const std::vector<Scenario>& scenarios,
                                const std::string& out_dir, OutputFormat format) {
    if (scenarios.empty()) throw ConfigError("compare: no scenarios");
    const Scenario& ref = scenarios.front();
    for (const Scenario& sc : scenarios) {
        const bool same = sc.A == ref.A && sc.B == ref.B && sc.C == ref.C &&
                          sc.seed == ref.seed && sc.T_sim == ref.T_sim &&
                          sc.noise_std == ref.noise_std && sc.source == ref.source &&
                          sc.csv_path == ref.csv_path &&
                          (sc.source == MeasurementSource::kCsv || sc.x0_true == ref.x0_true);
        if (!same)
            throw ConfigError("compare: scenario '" + sc.label +
                              "' does not share the measurement stream of '" + ref.label + "'");
    }

    CompareTable table;
    for (const Scenario& sc : scenarios) {
        const ScenarioResult res = run_scenario(sc, out_dir, format);
        CompareRow row;
        row.label = sc.label;
        row.rmse = res.rmse_value;
        row.final_err = res.trace.records.empty() ? 0.0 : res.trace.records.back().err_head;
        row.regret_T = res.report.R.empty() ? 0.0 : res.report.R.back();
        if (!res.report.bound2.empty()) row.bound2 = res.report.bound2.back();
        if (!res.report.bound3.empty()) row.bound3 = res.report.bound3.back();
        if (!res.report.bound4.empty()) row.bound4 = res.report.bound4.back();
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string CompareTable::format() const {
    std::ostringstream os;
    os << "label                          rmse          final_err     R(T)          bound3\n";
    for (const CompareRow& r : rows) {
        std::ostringstream line;
        line.setf(std::ios::scientific);
        line.precision(6);
        line << r.rmse << "  " << r.final_err << "  " << r.regret_T << "  ";
        if (r.bound3)
            line << *r.bound3;
        else
            line << "-";
        std::string label = r.label;
        label.resize(30, ' ');
        os << label << ' ' << line.str() << '\n';
    }
    return os.str();
}

}  // namespace pmhe
