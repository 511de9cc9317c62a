#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"
#include "tubalkit/diagnostics.hpp"
#include "tubalkit/problems.hpp"
#include "tubalkit/projection.hpp"
#include "tubalkit/solvers.hpp"
#include "tubalkit/tsvd.hpp"

using namespace tubalkit;
using tubalkit::testing::random_low_rank;
using tubalkit::testing::random_tensor;

namespace {

// f(x) = 1/2 ||w .* (x - c)||^2 with weights in [lo, 1], so beta = 1.
SmoothObjective weighted_quadratic(const DenseTensor& c, std::mt19937_64& rng, double lo) {
    std::uniform_real_distribution<double> pick(lo, 1.0);
    DenseTensor w(c.dims());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = pick(rng);
    SmoothObjective f;
    f.grad = [w, c](const DenseTensor& x) {
        DenseTensor g = x - c;
        for (std::size_t i = 0; i < g.size(); ++i) g[i] *= w[i] * w[i];
        return g;
    };
    f.eval = [w, c](const DenseTensor& x) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += std::pow(w[i] * (x[i] - c[i]), 2);
        return 0.5 * s;
    };
    f.beta = 1.0;
    return f;
}

std::vector<DenseTensor> iterates(SmoothResult (*solver)(const SmoothObjective&, const SolverConfig&,
                                                         const DenseTensor&),
                                  const SmoothObjective& f, SolverConfig cfg, const DenseTensor& x0) {
    std::vector<DenseTensor> xs;
    cfg.observer = [&](const TraceEntry&, const DenseTensor& x) { xs.push_back(x); };
    solver(f, cfg, x0);
    return xs;
}

DenseTensor fdiag_example() {
    DenseTensor x(Dims{2, 2, 2});
    x.at(0, 0, 0) = 3.0;
    x.at(1, 1, 0) = 1.0;
    return x;
}

// F(x, y) = <x - c, y> over the TNN ball and the unit l-infinity ball.
SaddleObjective bilinear(const DenseTensor& c) {
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
    s.beta_xy = 1.0;
    s.beta_yx = 1.0;
    return s;
}

}  // namespace

TEST(Theta, GoldenRatioAfterOne) {
    EXPECT_NEAR(next_theta(1.0), 0.5 * (1.0 + std::sqrt(5.0)), 1e-15);
    EXPECT_NEAR(next_theta(0.0), 1.0, 1e-15);
}

TEST(Projection, ParseKinds) {
    EXPECT_EQ(parse_projection_kind("full"), ProjectionKind::Full);
    EXPECT_EQ(parse_projection_kind("truncated_certified"), ProjectionKind::TruncatedCertified);
    EXPECT_EQ(parse_projection_kind("unchecked"), ProjectionKind::TruncatedUnchecked);
    EXPECT_THROW(parse_projection_kind("exact"), ConfigError);
    EXPECT_EQ(to_string(ProjectionKind::TruncatedUnchecked), "truncated_unchecked");
}

TEST(ProjectStep, CertifiedModeEscalatesWhenCertificateFails) {
    DenseTensor x = fdiag_example();
    auto full = project_tnn(x, 3.0);
    auto esc = project_step(x, 3.0, ProjectionMode::certified(1));
    EXPECT_TRUE(esc.escalated);
    EXPECT_FALSE(*esc.certified);
    EXPECT_LE(fro_norm(esc.x - full.projected), 1e-12);
    EXPECT_EQ(esc.rank, 2u);

    auto raw = project_step(x, 3.0, ProjectionMode::unchecked(1));
    EXPECT_FALSE(raw.escalated);
    EXPECT_FALSE(*raw.certified);
    EXPECT_EQ(raw.rank, 1u);
}

TEST(ProjectStep, FullModeMonitorsCertificate) {
    DenseTensor x = fdiag_example();
    EXPECT_TRUE(*project_step(x, 1.5, ProjectionMode::full(1)).certified);
    EXPECT_FALSE(*project_step(x, 3.0, ProjectionMode::full(1)).certified);
    EXPECT_FALSE(project_step(x, 3.0, ProjectionMode::full()).certified.has_value());
}

TEST(Trace, FirstCertifiedIteration) {
    SolverTrace t;
    EXPECT_FALSE(t.first_certified_iteration());
    for (auto [i, v] : std::vector<std::pair<std::size_t, bool>>{{1, true}, {2, false}, {3, true}, {4, true}}) {
        TraceEntry e;
        e.iteration = i;
        e.certified = v;
        t.entries.push_back(e);
    }
    EXPECT_EQ(*t.first_certified_iteration(), 3u);
    t.entries.back().certified = false;
    EXPECT_FALSE(t.first_certified_iteration());
    t.entries.back().certified.reset();
    EXPECT_FALSE(t.first_certified_iteration());
}

TEST(Pgd, UnitStepOnIsotropicQuadraticProjectsInOneStep) {
    std::mt19937_64 rng(301);
    DenseTensor c = random_tensor({4, 3, 3}, rng);
    double tau = 0.4 * tnn(c);
    SmoothObjective f;
    f.grad = [c](const DenseTensor& x) { return x - c; };
    f.eval = [c](const DenseTensor& x) { return 0.5 * std::pow(fro_norm(x - c), 2); };
    SolverConfig cfg;
    cfg.tau = tau;
    cfg.iterations = 1;
    auto res = pgd(f, cfg, DenseTensor(c.dims()));
    EXPECT_LE(fro_norm(res.x - project_tnn(c, tau).projected), 1e-12);
    EXPECT_LE(*res.trace.entries.back().dual_gap, 1e-10);
}

TEST(Pgd, RejectsInfeasibleStart) {
    std::mt19937_64 rng(302);
    DenseTensor c = random_tensor({3, 3, 2}, rng);
    SmoothObjective f = weighted_quadratic(c, rng, 0.5);
    SolverConfig cfg;
    cfg.tau = 0.5 * tnn(c);
    EXPECT_THROW(pgd(f, cfg, c), InfeasibleStart);
    cfg.tau = -1.0;
    EXPECT_THROW(pgd(f, cfg, DenseTensor(c.dims())), NegativeRadius);
}

TEST(Pgd, IteratesFeasibleAndDistanceNonincreasing) {
    std::mt19937_64 rng(303);
    DenseTensor c = random_tensor({5, 4, 3}, rng);
    SmoothObjective f = weighted_quadratic(c, rng, 0.3);
    SolverConfig cfg;
    cfg.tau = 0.3 * tnn(c);
    cfg.iterations = 3000;
    DenseTensor xstar = fista(f, cfg, DenseTensor(c.dims())).x;

    cfg.iterations = 60;
    cfg.reference = xstar;
    auto res = pgd(f, cfg, DenseTensor(c.dims()));
    double prev = fro_norm(xstar);
    for (const auto& e : res.trace.entries) {
        EXPECT_LE(*e.distance, prev + 1e-12) << "iteration " << e.iteration;
        prev = *e.distance;
    }
    for (const auto& x : iterates(pgd, f, cfg, DenseTensor(c.dims()))) EXPECT_LE(tnn(x), cfg.tau * (1 + 1e-8));
}

TEST(Fista, ReachesSmallDualGap) {
    std::mt19937_64 rng(304);
    DenseTensor c = random_tensor({5, 5, 4}, rng);
    SmoothObjective f = weighted_quadratic(c, rng, 0.2);
    SolverConfig cfg;
    cfg.tau = 0.5 * tnn(c);
    cfg.iterations = 1500;
    auto res = fista(f, cfg, DenseTensor(c.dims()));
    EXPECT_LE(dual_gap_smooth(res.x, f.grad(res.x), cfg.tau), 1e-8);
    EXPECT_LE(tnn(res.x), cfg.tau * (1 + 1e-8));
}

TEST(Rfgm, RestartOneMatchesPgd) {
    std::mt19937_64 rng(305);
    DenseTensor c = random_tensor({4, 4, 3}, rng);
    SmoothObjective f = weighted_quadratic(c, rng, 0.2);
    SolverConfig cfg;
    cfg.tau = 0.4 * tnn(c);
    cfg.iterations = 25;
    cfg.restart = 1;
    auto a = iterates(restarted_fgm, f, cfg, DenseTensor(c.dims()));
    auto b = iterates(pgd, f, cfg, DenseTensor(c.dims()));
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t t = 0; t < a.size(); ++t) EXPECT_EQ(a[t].values(), b[t].values());
}

TEST(Rfgm, RestartBeyondHorizonMatchesFista) {
    std::mt19937_64 rng(306);
    DenseTensor c = random_tensor({4, 4, 3}, rng);
    SmoothObjective f = weighted_quadratic(c, rng, 0.2);
    SolverConfig cfg;
    cfg.tau = 0.4 * tnn(c);
    cfg.iterations = 25;
    cfg.restart = 25;
    auto a = iterates(restarted_fgm, f, cfg, DenseTensor(c.dims()));
    auto b = iterates(fista, f, cfg, DenseTensor(c.dims()));
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t t = 0; t < a.size(); ++t) EXPECT_EQ(a[t].values(), b[t].values());
    cfg.restart = 0;
    EXPECT_THROW(restarted_fgm(f, cfg, DenseTensor(c.dims())), ShapeMismatch);
}

TEST(Rfgm, ConvergesToFistaSolution) {
    std::mt19937_64 rng(307);
    DenseTensor c = random_tensor({5, 4, 3}, rng);
    SmoothObjective f = weighted_quadratic(c, rng, 0.3);
    SolverConfig cfg;
    cfg.tau = 0.3 * tnn(c);
    cfg.iterations = 1500;
    cfg.restart = 20;
    auto a = restarted_fgm(f, cfg, DenseTensor(c.dims()));
    auto b = fista(f, cfg, DenseTensor(c.dims()));
    EXPECT_LE(fro_norm(a.x - b.x), 1e-6);
}

TEST(Solvers, GapToleranceStopsEarly) {
    std::mt19937_64 rng(308);
    DenseTensor c = random_tensor({4, 4, 3}, rng);
    SmoothObjective f = weighted_quadratic(c, rng, 0.5);
    SolverConfig cfg;
    cfg.tau = 0.4 * tnn(c);
    cfg.iterations = 5000;
    cfg.tol_gap = 1e-6;
    auto res = fista(f, cfg, DenseTensor(c.dims()));
    EXPECT_LT(res.trace.entries.size(), 5000u);
    EXPECT_LT(*res.trace.entries.back().dual_gap, 1e-6);
}

TEST(Solvers, CertifiedModeMatchesFullOnLowRankCompletion) {
    auto inst = gen_completion({10, 10, 4}, 1, 0.8, 11);
    auto f = completion_objective(inst);
    DenseTensor x0 = completion_init(inst, 1);
    SolverConfig cfg;
    cfg.tau = inst.tau;
    cfg.iterations = 40;
    cfg.projection = ProjectionMode::full(1);
    auto full = iterates(fista, f, cfg, x0);
    cfg.projection = ProjectionMode::certified(1);
    auto cert = iterates(fista, f, cfg, x0);
    ASSERT_EQ(full.size(), cert.size());
    for (std::size_t t = 0; t < full.size(); ++t) EXPECT_LE(fro_norm(full[t] - cert[t]), 1e-9) << t;
}

TEST(Extragradient, AutoStepForBilinearConstants) {
    std::mt19937_64 rng(309);
    auto s = bilinear(random_tensor({3, 3, 2}, rng));
    EXPECT_DOUBLE_EQ(extragradient_auto_step(s), 0.5);
    s.beta_xy = s.beta_yx = 0.0;
    EXPECT_THROW(extragradient_auto_step(s), ShapeMismatch);
}

TEST(Extragradient, RejectsInfeasibleDualStart) {
    std::mt19937_64 rng(310);
    DenseTensor c = random_tensor({3, 3, 2}, rng);
    auto s = bilinear(c);
    SolverConfig cfg;
    cfg.tau = 1.0;
    DualPoint y(c.dims());
    y[0] = 2.0;
    EXPECT_THROW(extragradient(s, cfg, DenseTensor(c.dims()), y), InfeasibleStart);
}

TEST(Extragradient, BilinearGapShrinks) {
    std::mt19937_64 rng(311);
    DenseTensor c = random_low_rank({6, 6, 3}, 1, rng);
    auto s = bilinear(c);
    SolverConfig cfg;
    cfg.tau = 0.8 * tnn(c);
    cfg.iterations = 400;
    cfg.step = 0.5;
    cfg.gap_every = 1;
    auto res = extragradient(s, cfg, DenseTensor(c.dims()), DualPoint(c.dims()));
    double g0 = *res.trace.entries.front().dual_gap;
    EXPECT_LT(res.best_gap, 0.1 * g0);
    EXPECT_LE(tnn(res.x_avg), cfg.tau * (1 + 1e-8));
    EXPECT_LE(max_abs(res.y_avg), 1.0 + 1e-12);
    EXPECT_NEAR(res.best_gap, dual_gap_saddle(res.x_best, res.y_best, s, cfg.tau), 1e-12);
    EXPECT_DOUBLE_EQ(res.eta, 0.5);
}
