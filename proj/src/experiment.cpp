#include "tubalkit/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "tubalkit/diagnostics.hpp"
#include "tubalkit/errors.hpp"
#include "tubalkit/problems.hpp"

namespace tubalkit {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const Setting& s, const std::string& why) {
    throw ConfigError(s.origin + ": " + s.key + " = '" + s.value + "': " + why);
}

template <class T>
T parse_number(const Setting& s, const std::string& text) {
    T v{};
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || text.empty()) bad_value(s, "expected a number");
    return v;
}

std::vector<std::string> split(const std::string& text, const std::string& seps) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (seps.find(c) != std::string::npos) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::vector<std::uint64_t> parse_seeds(const Setting& s) {
    std::vector<std::uint64_t> seeds;
    for (const auto& part : split(s.value, ",")) {
        auto dash = part.find('-');
        if (dash == std::string::npos) {
            seeds.push_back(parse_number<std::uint64_t>(s, part));
            continue;
        }
        auto lo = parse_number<std::uint64_t>(s, trim(part.substr(0, dash)));
        auto hi = parse_number<std::uint64_t>(s, trim(part.substr(dash + 1)));
        if (hi < lo) bad_value(s, "empty seed range");
        if (hi - lo > 1000000) bad_value(s, "seed range too long");
        for (auto k = lo; k <= hi; ++k) seeds.push_back(k);
    }
    return seeds;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SolverConfig solver_config(const ExperimentConfig& cfg, double tau, std::uint64_t seed) {
    SolverConfig sc;
    sc.step = cfg.step;
    sc.iterations = cfg.iterations;
    sc.tau = tau;
    sc.restart = cfg.restart;
    sc.gap_every = cfg.gap_every;
    sc.seed = seed;
    switch (cfg.projection) {
        case ProjectionKind::Full: {
            std::size_t kmin = std::min(cfg.dims[0], cfg.dims[1]);
            sc.projection = ProjectionMode::full(cfg.proj_rank < kmin ? std::optional(cfg.proj_rank) : std::nullopt);
            break;
        }
        case ProjectionKind::TruncatedCertified: sc.projection = ProjectionMode::certified(cfg.proj_rank); break;
        case ProjectionKind::TruncatedUnchecked: sc.projection = ProjectionMode::unchecked(cfg.proj_rank); break;
    }
    return sc;
}

RunRecord run_completion(const ExperimentConfig& cfg, std::uint64_t seed) {
    RunRecord rec;
    rec.seed = seed;
    CompletionInstance inst = gen_completion(cfg.dims, cfg.r, cfg.rho, seed, cfg.tau_fraction);
    SmoothObjective obj = completion_objective(inst);
    DenseTensor x0 = completion_init(inst, cfg.r);
    rec.init_error = recovery_error(x0, inst);

    SolverConfig sc = solver_config(cfg, inst.tau, seed);
    sc.observer = [&](const TraceEntry& e, const DenseTensor& x) {
        rec.trace.push_back({e.iteration, e.objective, recovery_error(x, inst)});
    };
    SmoothResult res;
    switch (cfg.solver) {
        case SolverKind::Pgd: res = pgd(obj, sc, x0); break;
        case SolverKind::Fista: res = fista(obj, sc, x0); break;
        case SolverKind::Rfgm: res = restarted_fgm(obj, sc, x0); break;
        case SolverKind::Eg: throw ConfigError("solver eg needs problem = rpca");
    }
    double f_final = obj.eval(res.x);
    for (auto& p : rec.trace) p.objective_gap_or_value -= f_final;

    DenseTensor g = obj.grad(res.x);
    rec.recovery_error = recovery_error(res.x, inst);
    rec.dual_gap = smooth_gap_value(res.x, g, inst.tau);
    rec.sc_measure = sc_measure_smooth(res.x, g);
    rec.first_certified_iteration = res.trace.first_certified_iteration();
    rec.escalations = res.trace.escalations;
    return rec;
}

RunRecord run_rpca(const ExperimentConfig& cfg, std::uint64_t seed) {
    RunRecord rec;
    rec.seed = seed;
    RpcaInstance inst = gen_rpca(cfg.dims[0], cfg.r, cfg.m, seed, cfg.tau_fraction, cfg.resolved_factor_sd());
    SaddleObjective sobj = rpca_saddle(inst);
    RpcaStart start = rpca_init(inst, cfg.r);
    rec.init_error = recovery_error(start.x, inst);

    SolverConfig sc = solver_config(cfg, inst.tau, seed);
    sc.observer = [&](const TraceEntry& e, const DenseTensor& x) {
        rec.trace.push_back({e.iteration, e.objective, recovery_error(x, inst)});
    };
    SaddleResult res = extragradient(sobj, sc, start.x, start.y);

    rec.recovery_error = recovery_error(res.x_best, inst);
    rec.dual_gap = res.best_gap;
    rec.sc_measure = sc_measure_smooth(res.x_best, sobj.grad_x(res.x_best, res.y_best));
    rec.first_certified_iteration = res.trace.first_certified_iteration();
    rec.escalations = res.trace.escalations;
    return rec;
}

const std::vector<std::string> kKeys = {"problem",   "dims",       "n",          "r",         "rho",     "m",
                                        "factor_sd", "tau_fraction", "solver",   "step",      "iterations",
                                        "projection", "proj_rank", "restart",    "gap_every", "seeds",   "output"};

}  // namespace

std::string to_string(ProblemKind kind) { return kind == ProblemKind::Completion ? "completion" : "rpca"; }

std::string to_string(SolverKind kind) {
    switch (kind) {
        case SolverKind::Pgd: return "pgd";
        case SolverKind::Fista: return "fista";
        case SolverKind::Rfgm: return "rfgm";
        case SolverKind::Eg: return "eg";
    }
    return "fista";
}

ExperimentConfig ExperimentConfig::defaults(ProblemKind kind) {
    ExperimentConfig c;
    if (kind == ProblemKind::Rpca) {
        c.problem = ProblemKind::Rpca;
        c.dims = {100, 100, 100};
        c.r = 5;
        c.tau_fraction = kRpcaTauFraction;
        c.solver = SolverKind::Eg;
        c.iterations = 10000;
        c.proj_rank = 5;
    } else {
        c.tau_fraction = kCompletionTauFraction;
    }
    return c;
}

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& what) { throw ConfigError(what); };
    if (dims.size() < 3) fail("dims needs at least 3 entries");
    for (std::size_t n : dims)
        if (n == 0) fail("dims must be positive");
    std::size_t kmin = std::min(dims[0], dims[1]);
    if (r == 0 || r > *std::min_element(dims.begin(), dims.end())) fail("r must lie in [1, min(dims)]");
    if (!(rho > 0.0 && rho <= 1.0)) fail("rho must lie in (0, 1]");
    if (!(m >= 0.0 && m <= 1.0)) fail("m must lie in [0, 1]");
    if (!(tau_fraction > 0.0)) fail("tau_fraction must be positive");
    if (step && !(*step > 0.0)) fail("step must be positive or auto");
    if (iterations == 0) fail("iterations must be positive");
    if (restart == 0) fail("restart must be positive");
    if (seeds.empty()) fail("seeds must not be empty");
    if (proj_rank == 0) fail("proj_rank must be positive");
    if (projection != ProjectionKind::Full && proj_rank >= kmin)
        fail("proj_rank must be below min(n1, n2) for truncated projections");
    if (problem == ProblemKind::Completion && solver == SolverKind::Eg) fail("solver eg needs problem = rpca");
    if (problem == ProblemKind::Rpca) {
        resolved_factor_sd();
        if (solver != SolverKind::Eg) fail("problem rpca needs solver = eg");
        if (dims.size() != 3 || dims[1] != dims[0] || dims[2] != dims[0]) fail("problem rpca needs dims n x n x n");
    }
}

double ExperimentConfig::resolved_factor_sd() const {
    double n = double(dims[0]);
    if (factor_sd == "inv_sqrt_n") return 1.0 / std::sqrt(n);
    if (factor_sd == "inv_n") return 1.0 / n;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(factor_sd.data(), factor_sd.data() + factor_sd.size(), v);
    if (ec != std::errc() || ptr != factor_sd.data() + factor_sd.size() || !(v > 0.0))
        throw ConfigError("factor_sd must be inv_sqrt_n, inv_n or a positive number");
    return v;
}

std::vector<Setting> parse_config_text(const std::string& text, const std::string& source) {
    std::vector<Setting> out;
    std::istringstream in(text);
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        std::string origin = source + ":" + std::to_string(lineno);
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(origin + ": expected key = value");
        Setting s{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), origin};
        if (s.key.empty()) throw ConfigError(origin + ": missing key");
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<Setting> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

std::vector<std::string> config_keys() { return kKeys; }

void apply_setting(ExperimentConfig& cfg, const Setting& s) {
    const std::string& k = s.key;
    const std::string& v = s.value;
    if (k == "problem") {
        if (v != "completion" && v != "rpca") bad_value(s, "expected completion or rpca");
        cfg.problem = v == "rpca" ? ProblemKind::Rpca : ProblemKind::Completion;
    } else if (k == "dims") {
        Dims d;
        for (const auto& part : split(v, "x,")) d.push_back(parse_number<std::size_t>(s, part));
        cfg.dims = d;
    } else if (k == "n") {
        std::size_t n = parse_number<std::size_t>(s, v);
        cfg.dims = {n, n, n};
    } else if (k == "r") {
        cfg.r = parse_number<std::size_t>(s, v);
    } else if (k == "rho") {
        cfg.rho = parse_number<double>(s, v);
    } else if (k == "m") {
        cfg.m = parse_number<double>(s, v);
    } else if (k == "factor_sd") {
        if (v != "inv_sqrt_n" && v != "inv_n" && !(parse_number<double>(s, v) > 0.0))
            bad_value(s, "expected inv_sqrt_n, inv_n or a positive number");
        cfg.factor_sd = v;
    } else if (k == "tau_fraction") {
        cfg.tau_fraction = parse_number<double>(s, v);
    } else if (k == "solver") {
        if (v == "pgd") cfg.solver = SolverKind::Pgd;
        else if (v == "fista") cfg.solver = SolverKind::Fista;
        else if (v == "rfgm") cfg.solver = SolverKind::Rfgm;
        else if (v == "eg") cfg.solver = SolverKind::Eg;
        else bad_value(s, "expected pgd, fista, rfgm or eg");
    } else if (k == "step") {
        if (v == "auto") cfg.step.reset();
        else cfg.step = parse_number<double>(s, v);
    } else if (k == "iterations") {
        cfg.iterations = parse_number<std::size_t>(s, v);
    } else if (k == "projection") {
        try {
            cfg.projection = parse_projection_kind(v);
        } catch (const ConfigError&) {
            bad_value(s, "expected full, truncated_certified or truncated_unchecked");
        }
    } else if (k == "proj_rank") {
        cfg.proj_rank = parse_number<std::size_t>(s, v);
    } else if (k == "restart") {
        cfg.restart = parse_number<std::size_t>(s, v);
    } else if (k == "gap_every") {
        cfg.gap_every = parse_number<std::size_t>(s, v);
    } else if (k == "seeds") {
        cfg.seeds = parse_seeds(s);
    } else if (k == "output") {
        cfg.output = v;
    } else {
        throw ConfigError(s.origin + ": unknown key '" + k + "'");
    }
}

ExperimentConfig build_config(const std::vector<Setting>& settings) {
    ExperimentConfig probe;
    bool rank_set = false;
    for (const auto& s : settings) {
        if (s.key == "problem") apply_setting(probe, s);
        rank_set = rank_set || s.key == "proj_rank";
    }
    ExperimentConfig cfg = ExperimentConfig::defaults(probe.problem);
    for (const auto& s : settings) apply_setting(cfg, s);
    if (!rank_set) cfg.proj_rank = cfg.r;
    cfg.validate();
    return cfg;
}

RunRecord run_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    auto t0 = std::chrono::steady_clock::now();
    RunRecord rec = cfg.problem == ProblemKind::Completion ? run_completion(cfg, seed) : run_rpca(cfg, seed);
    rec.wall_time = seconds_since(t0);
    return rec;
}

ExperimentSummary summarize(std::vector<RunRecord> runs) {
    ExperimentSummary s;
    s.runs = std::move(runs);
    if (s.runs.empty()) return s;
    double k = double(s.runs.size());
    for (const auto& r : s.runs) {
        s.init_error += r.init_error;
        s.recovery_error += r.recovery_error;
        s.dual_gap += r.dual_gap;
        s.sc_measure += r.sc_measure;
        s.first_certified_iteration += r.first_certified_iteration
                                           ? double(*r.first_certified_iteration)
                                           : std::numeric_limits<double>::quiet_NaN();
        s.wall_time += r.wall_time;
        s.escalations += double(r.escalations);
    }
    s.init_error /= k;
    s.recovery_error /= k;
    s.dual_gap /= k;
    s.sc_measure /= k;
    s.first_certified_iteration /= k;
    s.wall_time /= k;
    s.escalations /= k;
    return s;
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<RunRecord> runs;
    for (std::uint64_t seed : cfg.seeds) runs.push_back(run_seed(cfg, seed));
    ExperimentSummary summary = summarize(std::move(runs));
    if (!cfg.output.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(cfg.output, ec);
        if (ec) throw IoError("cannot create " + cfg.output + ": " + ec.message());
        write_runs_csv(cfg.output + "/runs.csv", summary);
        for (const auto& r : summary.runs)
            write_trace_csv(cfg.output + "/trace_seed" + std::to_string(r.seed) + ".csv", r);
    }
    return summary;
}

void write_runs_csv(const std::string& path, const ExperimentSummary& summary) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << kCsvHeader << "\n"
        << "seed,init_error,recovery_error,dual_gap,sc_measure,first_certified_iteration,wall_time,escalations\n";
    for (const auto& r : summary.runs) {
        out << r.seed << ',' << fmt(r.init_error) << ',' << fmt(r.recovery_error) << ',' << fmt(r.dual_gap) << ','
            << fmt(r.sc_measure) << ','
            << (r.first_certified_iteration ? std::to_string(*r.first_certified_iteration) : std::string("nan"))
            << ',' << fmt(r.wall_time) << ',' << r.escalations << "\n";
    }
    out << "mean," << fmt(summary.init_error) << ',' << fmt(summary.recovery_error) << ','
        << fmt(summary.dual_gap) << ',' << fmt(summary.sc_measure) << ','
        << fmt(summary.first_certified_iteration) << ',' << fmt(summary.wall_time) << ','
        << fmt(summary.escalations) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

void write_trace_csv(const std::string& path, const RunRecord& run) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << kCsvHeader << "\n" << "iteration,objective_gap_or_value,recovery_error\n";
    for (const auto& p : run.trace)
        out << p.iteration << ',' << fmt(p.objective_gap_or_value) << ',' << fmt(p.recovery_error) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace tubalkit
