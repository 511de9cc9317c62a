// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance            run all criteria
//   acceptance 1,2,9      run a subset

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "test_support.hpp"
#include "tubalkit/algebra.hpp"
#include "tubalkit/diagnostics.hpp"
#include "tubalkit/experiment.hpp"
#include "tubalkit/fourier.hpp"
#include "tubalkit/problems.hpp"
#include "tubalkit/projection.hpp"
#include "tubalkit/solvers.hpp"
#include "tubalkit/tsvd.hpp"

using namespace tubalkit;
using tubalkit::testing::first_block_column;
using tubalkit::testing::random_tensor;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

double rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

double rel(const DenseTensor& a, const DenseTensor& b) { return fro_norm(a - b) / std::max(1.0, fro_norm(b)); }

Dims random_shape(std::mt19937_64& rng, std::size_t max_dim) {
    std::uniform_int_distribution<std::size_t> order(3, 4);
    return tubalkit::testing::random_dims(rng, order(rng), max_dim);
}

// Projection of a matrix onto the nuclear-norm ball of the given radius.
Eigen::MatrixXd project_nuclear(const Eigen::MatrixXd& a, double radius) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd s = svd.singularValues();
    if (s.sum() <= radius) return a;
    // Largest k with sum_{i<k} (s_i - s_{k-1}) < radius fixes the threshold.
    double sigma = 0.0, prefix = 0.0;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        prefix += s(k);
        double t = (prefix - radius) / double(k + 1);
        if (k + 1 == s.size() || t >= s(k + 1)) {
            sigma = t;
            break;
        }
    }
    Eigen::VectorXd shrunk = (s.array() - sigma).max(0.0);
    return svd.matrixU() * shrunk.asDiagonal() * svd.matrixV().transpose();
}

// Criterion 1 -------------------------------------------------------------

Outcome algebra_oracles() {
    std::mt19937_64 rng(1001);
    double worst = 0.0;
    std::string worst_op;
    auto track = [&](double e, const char* op) {
        if (e > worst) {
            worst = e;
            worst_op = op;
        }
    };
    for (int trial = 0; trial < 200; ++trial) {
        Dims d = random_shape(rng, 6);
        DenseTensor x = random_tensor(d, rng);
        Dims dy = d;
        dy[0] = d[1];
        dy[1] = 1 + rng() % 6;
        DenseTensor y = random_tensor(dy, rng);
        double n = double(x.num_slices());

        Eigen::MatrixXd bx = bcirc_explicit(x);
        Dims dxy = d;
        dxy[1] = dy[1];
        DenseTensor xy = fold_slices(bx * unfold_slices(y), dxy);
        track(rel(t_product(x, y), xy), "t_product");
        track(rel(bcirc_explicit(t_transpose(x)), bx.transpose().eval()), "t_transpose");

        Eigen::VectorXd sv = Eigen::BDCSVD<Eigen::MatrixXd>(bx).singularValues();
        track(rel(tnn(x), sv.sum() / n), "tnn");
        track(rel(spectral_norm(x), sv.size() ? sv(0) : 0.0), "spectral_norm");

        std::uniform_real_distribution<double> frac(0.05, 1.2);
        double tau = frac(rng) * tnn(x);
        DenseTensor oracle = first_block_column(project_nuclear(bx, tau * n), d);
        track(rel(project_tnn(x, tau).projected, oracle), "project_tnn");
    }
    return {worst <= 1e-9, "worst relative error " + fmt("%.2e", worst) + " (" + worst_op + ")"};
}

// Criterion 2 -------------------------------------------------------------

Outcome tsvd_suite() {
    std::mt19937_64 rng(1002);
    double recon = 0.0, unitary = 0.0, pairing = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::uniform_int_distribution<std::size_t> p1(1, 20), p2(1, 15), p3(1, 4), p4(1, 3);
        Dims d = trial % 2 ? Dims{p1(rng), p2(rng), p3(rng), p4(rng)} : Dims{p1(rng), p2(rng), p3(rng)};
        DenseTensor x = random_tensor(d, rng);
        TsvdFactors f = tsvd(x);
        recon = std::max(recon, fro_norm(f.reconstruct() - x) / std::max(1e-300, fro_norm(x)));
        SlicePairing pairs(d);
        Eigen::Index k = Eigen::Index(f.width());
        FourierSlices uh = fft_tensor(f.u), sh = fft_tensor(f.s), vh = fft_tensor(f.v);
        for (std::size_t s = 0; s < uh.num_slices(); ++s) {
            auto u = uh.slice(s);
            auto v = vh.slice(s);
            unitary = std::max(unitary, (u.adjoint() * u - CMatrix::Identity(k, k)).norm());
            unitary = std::max(unitary, (v.adjoint() * v - CMatrix::Identity(k, k)).norm());
            std::size_t p = pairs.partner[s];
            pairing = std::max(pairing, (u - uh.slice(p).conjugate()).norm());
            pairing = std::max(pairing, (v - vh.slice(p).conjugate()).norm());
            pairing = std::max(pairing, (sh.slice(s) - sh.slice(p).conjugate()).norm());
        }
    }
    bool ok = recon <= 1e-9 && unitary <= 1e-9 && pairing <= 1e-10;
    return {ok, "reconstruction " + fmt("%.2e", recon) + ", unitarity " + fmt("%.2e", unitary) + ", pairing " +
                    fmt("%.2e", pairing)};
}

// Criterion 3 -------------------------------------------------------------

Outcome projection_properties() {
    std::mt19937_64 rng(1003);
    double infeasible = 0.0, idem = 0.0, variational = -1.0;
    for (int trial = 0; trial < 100; ++trial) {
        Dims d = random_shape(rng, 6);
        DenseTensor x = random_tensor(d, rng);
        std::uniform_real_distribution<double> frac(0.05, 0.95), unit(0.0, 1.0);
        double tau = frac(rng) * tnn(x);
        DenseTensor p = project_tnn(x, tau).projected;
        infeasible = std::max(infeasible, tnn(p) / tau - 1.0);
        idem = std::max(idem, rel(project_tnn(p, tau).projected, p));
        DenseTensor resid = x - p;
        for (int j = 0; j < 100; ++j) {
            DenseTensor z = random_tensor(d, rng);
            double t = tnn(z);
            if (t > 0.0) z = (unit(rng) * tau / t) * z;
            double v = inner(resid, z - p) / std::max(1.0, fro_norm(resid) * fro_norm(z - p));
            variational = std::max(variational, v);
        }
    }
    std::size_t agree = 0, total = 0, certified = 0;
    for (int trial = 0; trial < 200; ++trial) {
        Dims d = random_shape(rng, 6);
        std::size_t kmin = std::min(d[0], d[1]);
        if (kmin < 2) {
            --trial;
            continue;
        }
        DenseTensor x = trial % 3 == 0 ? tubalkit::testing::random_low_rank(d, 1 + rng() % kmin, rng)
                                       : random_tensor(d, rng);
        std::uniform_real_distribution<double> frac(0.02, 0.9);
        double tau = frac(rng) * tnn(x);
        std::size_t r = 1 + rng() % (kmin - 1);
        bool verdict = truncated_project_tnn(x, tau, r).certificate_rank.has_value();
        bool truth = tubal_rank(project_tnn(x, tau).projected) <= r;
        agree += verdict == truth;
        certified += verdict;
        ++total;
    }
    bool ok = infeasible <= 1e-9 && idem <= 1e-10 && variational <= 1e-9 && agree == total;
    return {ok, "tnn excess " + fmt("%.1e", infeasible) + ", idempotence " + fmt("%.1e", idem) +
                    ", max normalized <x-P(x), z-P(x)> " + fmt("%.1e", variational) + ", certificate agreement " +
                    std::to_string(agree) + "/" + std::to_string(total) + " (" + std::to_string(certified) +
                    " certified)"};
}

// Criteria 4 and 5 --------------------------------------------------------

const ExperimentSummary& completion_runs() {
    static ExperimentSummary summary = [] {
        ExperimentConfig cfg = ExperimentConfig::defaults(ProblemKind::Completion);
        cfg.output.clear();
        return run_experiment(cfg);
    }();
    return summary;
}

Outcome completion_reproduction() {
    auto t0 = Clock::now();
    const auto& s = completion_runs();
    double secs = seconds_since(t0);
    bool ok = s.recovery_error >= 0.03 && s.recovery_error <= 0.09 && s.dual_gap <= 1e-6 && s.sc_measure >= 2.5 &&
              s.sc_measure <= 6.5 && s.first_certified_iteration <= 10.0 && secs < 20 * 60;
    return {ok, "10 seeds: recovery " + fmt("%.4f", s.recovery_error) + " (init " + fmt("%.4f", s.init_error) +
                    "), dual gap " + fmt("%.2e", s.dual_gap) + ", SC " + fmt("%.4f", s.sc_measure) +
                    ", first certified " + fmt("%.1f", s.first_certified_iteration) + ", " + fmt("%.0f", secs) +
                    " s"};
}

Outcome linear_rate() {
    const auto& s = completion_runs();
    double worst_r2 = 1.0, worst_slope = -1e300;
    for (const auto& run : s.runs) {
        std::vector<double> ts, ys;
        for (const auto& p : run.trace) {
            if (p.iteration < 5 || p.iteration > 50) continue;
            if (!(p.objective_gap_or_value > 0.0)) continue;
            ts.push_back(double(p.iteration));
            ys.push_back(std::log10(p.objective_gap_or_value));
        }
        if (ts.size() < 3) return {false, "seed " + std::to_string(run.seed) + ": too few positive gaps"};
        double n = double(ts.size());
        double mt = 0, my = 0;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            mt += ts[i] / n;
            my += ys[i] / n;
        }
        double stt = 0, sty = 0, syy = 0;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            stt += (ts[i] - mt) * (ts[i] - mt);
            sty += (ts[i] - mt) * (ys[i] - my);
            syy += (ys[i] - my) * (ys[i] - my);
        }
        double slope = sty / stt;
        double r2 = syy > 0 ? sty * sty / (stt * syy) : 1.0;
        worst_r2 = std::min(worst_r2, r2);
        worst_slope = std::max(worst_slope, slope);
    }
    return {worst_slope < 0.0 && worst_r2 >= 0.9,
            "over iterations 5-50: largest slope " + fmt("%.4f", worst_slope) + " per iteration, smallest R^2 " +
                fmt("%.4f", worst_r2)};
}

// Criteria 6 and 8 --------------------------------------------------------

ExperimentConfig desk_config() {
    ExperimentConfig cfg = ExperimentConfig::defaults(ProblemKind::Completion);
    cfg.dims = {20, 20, 20};
    cfg.seeds = {1, 2, 3, 4, 5};
    cfg.output.clear();
    return cfg;
}

Outcome desk_completion() {
    auto t0 = Clock::now();
    ExperimentSummary s = run_experiment(desk_config());
    double secs = seconds_since(t0);
    bool ok = secs < 60.0;
    std::ostringstream d;
    for (const auto& r : s.runs) {
        bool improves = r.recovery_error < r.init_error;
        bool cert = r.first_certified_iteration && *r.first_certified_iteration <= 15;
        ok = ok && improves && cert;
        d << "seed " << r.seed << ": " << fmt("%.4f", r.init_error) << " -> " << fmt("%.4f", r.recovery_error)
          << ", certified from "
          << (r.first_certified_iteration ? std::to_string(*r.first_certified_iteration) : "never") << "; ";
    }
    d << fmt("%.1f", secs) << " s";
    return {ok, d.str()};
}

Outcome truncated_full_equivalence() {
    ExperimentConfig cfg = desk_config();
    double worst = 0.0;
    std::size_t unlogged = 0, escalations = 0;
    std::ostringstream d;
    for (std::uint64_t seed : cfg.seeds) {
        auto inst = gen_completion(cfg.dims, cfg.r, cfg.rho, seed, cfg.tau_fraction);
        auto obj = completion_objective(inst);
        DenseTensor x0 = completion_init(inst, cfg.r);
        SolverConfig sc;
        sc.step = cfg.step;
        sc.iterations = cfg.iterations;
        sc.tau = inst.tau;

        std::vector<DenseTensor> full_iterates;
        sc.projection = ProjectionMode::full(cfg.r);
        sc.observer = [&](const TraceEntry&, const DenseTensor& x) { full_iterates.push_back(x); };
        SmoothResult full = fista(obj, sc, x0);

        std::vector<double> diffs;
        std::vector<bool> escalated;
        sc.projection = ProjectionMode::certified(cfg.r);
        sc.observer = [&](const TraceEntry& e, const DenseTensor& x) {
            diffs.push_back(rel(x, full_iterates[e.iteration - 1]));
            escalated.push_back(e.escalated);
        };
        SmoothResult cert = fista(obj, sc, x0);
        escalations += cert.trace.escalations;
        std::size_t t0 = cert.trace.first_certified_iteration().value_or(cfg.iterations + 1);
        std::size_t t0_full = full.trace.first_certified_iteration().value_or(cfg.iterations + 1);
        for (std::size_t t = 1; t <= diffs.size(); ++t) {
            if (t >= t0) worst = std::max(worst, diffs[t - 1]);
            if (diffs[t - 1] > 1e-10 && !escalated[t - 1]) ++unlogged;
        }
        d << "seed " << seed << " certified from " << t0 << " (full-mode monitor " << t0_full << "); ";
    }
    d << "max relative iterate difference after certification " << fmt("%.1e", worst) << ", unlogged divergences "
      << unlogged << ", escalations " << escalations;
    return {worst <= 1e-10 && unlogged == 0, d.str()};
}

// Criterion 7 -------------------------------------------------------------

Outcome rpca_reproduction() {
    auto t0 = Clock::now();
    ExperimentConfig cfg = ExperimentConfig::defaults(ProblemKind::Rpca);
    cfg.iterations = 2000;
    cfg.seeds = {1, 2, 3};
    cfg.output.clear();
    ExperimentSummary s = run_experiment(cfg);
    double secs = seconds_since(t0);
    bool ok = s.recovery_error <= 0.05 && s.sc_measure > 50.0 && secs < 60 * 60;
    std::ostringstream d;
    for (const auto& r : s.runs) {
        ok = ok && r.first_certified_iteration == std::optional<std::size_t>(1);
        d << "seed " << r.seed << ": " << fmt("%.4f", r.init_error) << " -> " << fmt("%.4f", r.recovery_error)
          << ", SC " << fmt("%.1f", r.sc_measure) << ", gap " << fmt("%.3g", r.dual_gap) << ", certified from "
          << (r.first_certified_iteration ? std::to_string(*r.first_certified_iteration) : "never") << "; ";
    }
    d << "mean recovery " << fmt("%.4f", s.recovery_error) << ", mean SC " << fmt("%.1f", s.sc_measure) << "; "
      << fmt("%.0f", secs) << " s";

    auto t1 = Clock::now();
    ExperimentConfig fast = ExperimentConfig::defaults(ProblemKind::Rpca);
    fast.dims = {50, 50, 50};
    fast.r = 3;
    fast.proj_rank = 3;
    fast.iterations = 1000;
    RunRecord r = run_seed(fast, 1);
    double fast_secs = seconds_since(t1);
    bool fast_ok = r.recovery_error < 0.2 * r.init_error && fast_secs < 5 * 60;
    d << "; fast variant n=50: " << fmt("%.4f", r.init_error) << " -> " << fmt("%.4f", r.recovery_error) << " in "
      << fmt("%.0f", fast_secs) << " s";
    return {ok && fast_ok, d.str()};
}

// Criterion 9 -------------------------------------------------------------

Outcome extragradient_rate() {
    std::mt19937_64 rng(1009);
    Dims d{10, 10, 4};
    DenseTensor c = tubalkit::testing::random_low_rank(d, 2, rng);
    for (std::size_t i = 0; i < c.size(); ++i)
        if (rng() % 10 == 0) c[i] += (rng() % 2 ? 1.0 : -1.0);
    SaddleObjective s;
    s.value = [c](const DenseTensor& x, const DualPoint& y) { return inner(x - c, y); };
    s.grad_x = [](const DenseTensor&, const DualPoint& y) { return y; };
    s.grad_y = [c](const DenseTensor& x, const DualPoint&) { return x - c; };
    s.project_dual = [](const DualPoint& y) { return project_linf(y, 1.0); };
    s.support = [](const DualPoint& g) {
        double t = 0.0;
        for (double v : g.values()) t += std::abs(v);
        return t;
    };
    s.beta_xy = s.beta_yx = 1.0;

    SolverConfig cfg;
    cfg.tau = 0.6 * tnn(c);
    cfg.gap_every = 0;
    std::vector<double> gaps;
    for (std::size_t t : {100, 200, 400}) {
        cfg.iterations = t;
        auto res = extragradient(s, cfg, DenseTensor(d), DualPoint(d));
        gaps.push_back(dual_gap_saddle(res.x_avg, res.y_avg, s, cfg.tau));
    }
    bool ok = gaps[1] < gaps[0] && gaps[2] < gaps[1] && gaps[1] <= 0.7 * gaps[0] && gaps[2] <= 0.7 * gaps[1];
    return {ok, "ergodic gaps at T=100,200,400: " + fmt("%.4g", gaps[0]) + ", " + fmt("%.4g", gaps[1]) + ", " +
                    fmt("%.4g", gaps[2]) + " (ratios " + fmt("%.3f", gaps[1] / gaps[0]) + ", " +
                    fmt("%.3f", gaps[2] / gaps[1]) + ")"};
}

// Criterion 10 ------------------------------------------------------------

double fd_worst(const std::function<double(const DenseTensor&)>& f,
                const std::function<DenseTensor(const DenseTensor&)>& grad, const Dims& d, std::mt19937_64& rng) {
    double worst = 0.0;
    for (int probe = 0; probe < 20; ++probe) {
        DenseTensor x = random_tensor(d, rng);
        DenseTensor dir = random_tensor(d, rng);
        double h = 1e-6;
        DenseTensor xp = x, xm = x;
        xp.axpy(h, dir);
        xm.axpy(-h, dir);
        double fd = (f(xp) - f(xm)) / (2 * h);
        double exact = inner(grad(x), dir);
        worst = std::max(worst, std::abs(fd - exact) / std::max(1.0, std::abs(exact)));
    }
    return worst;
}

Outcome gradient_checks() {
    std::mt19937_64 rng(1010);
    double worst = 0.0;
    for (const Dims& d : {Dims{6, 5, 4}, Dims{4, 3, 3, 2}}) {
        auto inst = gen_completion(d, 2, 0.6, 17);
        auto f = completion_objective(inst);
        worst = std::max(worst, fd_worst(f.eval, f.grad, d, rng));
    }
    auto inst = gen_rpca(8, 2, 0.05, 17);
    auto s = rpca_saddle(inst);
    DenseTensor y0 = random_tensor(inst.dims, rng);
    DenseTensor x0 = random_tensor(inst.dims, rng);
    worst = std::max(worst, fd_worst([&](const DenseTensor& x) { return s.value(x, y0); },
                                     [&](const DenseTensor& x) { return s.grad_x(x, y0); }, inst.dims, rng));
    worst = std::max(worst, fd_worst([&](const DenseTensor& y) { return s.value(x0, y); },
                                     [&](const DenseTensor& y) { return s.grad_y(x0, y); }, inst.dims, rng));
    return {worst <= 1e-5, "worst relative finite-difference mismatch " + fmt("%.2e", worst) +
                               " over completion (d=3,4) and both saddle blocks"};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
    // Hard runtime pin in seconds; 0 when the criterion checks its own.
    double limit;
};

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    if (argc > 1) {
        std::stringstream ss(argv[1]);
        std::string tok;
        while (std::getline(ss, tok, ',')) only.insert(std::stoi(tok));
    }
    std::vector<Criterion> criteria = {
        {1, "algebra oracle suite", algebra_oracles, 60},
        {2, "t-SVD suite", tsvd_suite, 60},
        {3, "projection properties", projection_properties, 120},
        {4, "completion reproduction", completion_reproduction, 0},
        {5, "linear rate", linear_rate, 0},
        {6, "desk-scale completion", desk_completion, 0},
        {7, "RPCA reproduction", rpca_reproduction, 0},
        {8, "truncated/full equivalence", truncated_full_equivalence, 0},
        {9, "extragradient O(1/T)", extragradient_rate, 0},
        {10, "gradient checks", gradient_checks, 0},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.id)) continue;
        auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = seconds_since(t0);
        if (c.limit > 0 && secs >= c.limit) {
            o.pass = false;
            o.detail += "; exceeded " + fmt("%.0f", c.limit) + " s";
        }
        std::printf("%s %d %s [%.1f s]: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
        std::fflush(stdout);
        failures += !o.pass;
    }
    return failures == 0 ? 0 : 1;
}
