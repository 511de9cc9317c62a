#include "tubalkit/solvers.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "tubalkit/diagnostics.hpp"
#include "tubalkit/fourier.hpp"
#include "tubalkit/projection.hpp"
#include "tubalkit/tsvd.hpp"

namespace tubalkit {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void require_feasible_start(const DenseTensor& x0, double tau) {
    if (tau < 0.0) throw NegativeRadius("TNN radius must be nonnegative");
    if (tnn(x0) > tau * (1.0 + 1e-8) + 1e-14) throw InfeasibleStart("initial point lies outside the TNN ball");
}

bool gap_due(const SolverConfig& cfg, std::size_t t) {
    if (t == cfg.iterations) return true;
    return cfg.gap_every > 0 && t % cfg.gap_every == 0;
}

void fill_common(TraceEntry& e, const SolverConfig& cfg, const DenseTensor& x, Clock::time_point start) {
    if (cfg.reference) e.distance = fro_norm(x - *cfg.reference);
    e.wall_time = seconds_since(start);
}

// Alg. 3 with restart block k; k = 1 gives PGD and k >= T gives FISTA.
SmoothResult momentum_loop(const SmoothObjective& obj, const SolverConfig& cfg, const DenseTensor& x0,
                           std::size_t k) {
    require_feasible_start(x0, cfg.tau);
    if (k == 0) throw ShapeMismatch("restart block must be at least 1");
    double eta = cfg.step ? *cfg.step : 1.0 / obj.beta;
    if (!(eta > 0.0)) throw ShapeMismatch("step size must be positive");
    auto start = Clock::now();
    SmoothResult out;
    DenseTensor x = x0, y = x0;
    double theta = 1.0;
    std::size_t budget = 0;
    for (std::size_t t = 1; t <= cfg.iterations; ++t) {
        if ((t - 1) % k == 0) {
            y = x;
            theta = 1.0;
        }
        DenseTensor v = y;
        v.axpy(-eta, obj.grad(y));
        StepProjection p = project_step(v, cfg.tau, cfg.projection, cfg.svd);
        double theta_next = next_theta(theta);
        double momentum = (theta - 1.0) / theta_next;
        y = p.x;
        if (momentum != 0.0) y.axpy(momentum, p.x - x);
        x = std::move(p.x);
        theta = theta_next;

        budget += p.svd_triplets;
        TraceEntry e;
        e.iteration = t;
        e.objective = obj.eval(x);
        e.projection_rank = p.rank;
        e.certified = p.certified;
        e.escalated = p.escalated;
        e.svd_rank_budget = budget;
        if (p.escalated) ++out.trace.escalations;
        bool stop = false;
        if (gap_due(cfg, t) || cfg.tol_gap) {
            e.dual_gap = smooth_gap_value(x, obj.grad(x), cfg.tau);
            stop = cfg.tol_gap && *e.dual_gap < *cfg.tol_gap;
        }
        fill_common(e, cfg, x, start);
        out.trace.entries.push_back(e);
        if (cfg.observer) cfg.observer(e, x);
        if (stop) break;
    }
    out.x = std::move(x);
    return out;
}

}  // namespace

std::string to_string(ProjectionKind kind) {
    switch (kind) {
        case ProjectionKind::Full: return "full";
        case ProjectionKind::TruncatedCertified: return "truncated_certified";
        case ProjectionKind::TruncatedUnchecked: return "truncated_unchecked";
    }
    return "full";
}

ProjectionKind parse_projection_kind(const std::string& s) {
    if (s == "full") return ProjectionKind::Full;
    if (s == "truncated_certified" || s == "certified") return ProjectionKind::TruncatedCertified;
    if (s == "truncated_unchecked" || s == "unchecked") return ProjectionKind::TruncatedUnchecked;
    throw ConfigError("unknown projection mode '" + s + "'");
}

double next_theta(double theta) { return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta)); }

std::optional<std::size_t> SolverTrace::first_certified_iteration() const {
    std::optional<std::size_t> first;
    for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
        if (!it->certified.value_or(false)) break;
        first = it->iteration;
    }
    return first;
}

StepProjection project_step(const DenseTensor& v, double tau, const ProjectionMode& mode,
                            const TruncatedSvdOptions& svd) {
    StepProjection out;
    std::size_t full_triplets = v.num_slices() * std::min(v.n1(), v.n2());
    auto full = [&]() {
        FourierSvd f = fourier_svd(fft_tensor(v));
        ProjectionResult p = project_from_svd(f, tau, v);
        out.rank = p.rank();
        out.x = std::move(p.projected);
        out.svd_triplets += full_triplets;
        return f;
    };
    if (mode.kind == ProjectionKind::Full) {
        FourierSvd f = full();
        if (mode.monitor_rank && *mode.monitor_rank < std::min(v.n1(), v.n2()))
            out.certified = certificate_check(f.spectrum(), tau, *mode.monitor_rank).holds;
        return out;
    }
    ProjectionResult p = truncated_project_tnn(v, tau, mode.rank, svd);
    out.svd_triplets = v.num_slices() * (mode.rank + 1);
    out.certified = p.certificate_rank.has_value();
    if (!*out.certified && mode.kind == ProjectionKind::TruncatedCertified) {
        out.escalated = true;
        full();
        return out;
    }
    out.rank = p.rank();
    out.x = std::move(p.projected);
    return out;
}

SmoothResult pgd(const SmoothObjective& obj, const SolverConfig& cfg, const DenseTensor& x0) {
    return momentum_loop(obj, cfg, x0, 1);
}

SmoothResult fista(const SmoothObjective& obj, const SolverConfig& cfg, const DenseTensor& x0) {
    return momentum_loop(obj, cfg, x0, std::max<std::size_t>(cfg.iterations, 1));
}

SmoothResult restarted_fgm(const SmoothObjective& obj, const SolverConfig& cfg, const DenseTensor& x0) {
    return momentum_loop(obj, cfg, x0, cfg.restart);
}

double extragradient_auto_step(const SaddleObjective& s) {
    double inf = std::numeric_limits<double>::infinity();
    auto inv = [&](double d) { return d > 0.0 ? 1.0 / d : inf; };
    double eta = std::min({inv(2.0 * std::hypot(s.beta_x, s.beta_yx)), inv(2.0 * std::hypot(s.beta_y, s.beta_xy)),
                           inv(s.beta_x + s.beta_xy), inv(s.beta_y + s.beta_yx)});
    if (!std::isfinite(eta)) throw ShapeMismatch("auto step needs a nonzero smoothness constant");
    return eta;
}

SaddleResult extragradient(const SaddleObjective& sobj, const SolverConfig& cfg, const DenseTensor& x0,
                           const DualPoint& y0) {
    require_feasible_start(x0, cfg.tau);
    if (fro_norm(sobj.project_dual(y0) - y0) > 1e-10 * std::max(1.0, fro_norm(y0)))
        throw InfeasibleStart("initial dual point lies outside K");
    double eta = cfg.step ? *cfg.step : extragradient_auto_step(sobj);
    if (!(eta > 0.0)) throw ShapeMismatch("step size must be positive");
    auto start = Clock::now();
    SaddleResult out;
    out.eta = eta;
    out.best_gap = std::numeric_limits<double>::infinity();
    DenseTensor x = x0;
    DualPoint y = y0;
    DenseTensor sum_z(x0.dims());
    DualPoint sum_w(y0.dims());
    std::size_t budget = 0;
    for (std::size_t t = 1; t <= cfg.iterations; ++t) {
        DenseTensor vz = x;
        vz.axpy(-eta, sobj.grad_x(x, y));
        DualPoint vw = y;
        vw.axpy(eta, sobj.grad_y(x, y));
        StepProjection pz = project_step(vz, cfg.tau, cfg.projection, cfg.svd);
        DualPoint w = sobj.project_dual(vw);

        DenseTensor vx = x;
        vx.axpy(-eta, sobj.grad_x(pz.x, w));
        DualPoint vy = y;
        vy.axpy(eta, sobj.grad_y(pz.x, w));
        StepProjection px = project_step(vx, cfg.tau, cfg.projection, cfg.svd);
        y = sobj.project_dual(vy);
        x = std::move(px.x);

        sum_z += pz.x;
        sum_w += w;
        double inv_t = 1.0 / double(t);

        budget += pz.svd_triplets + px.svd_triplets;
        TraceEntry e;
        e.iteration = t;
        e.projection_rank = std::max(pz.rank, px.rank);
        if (pz.certified && px.certified) e.certified = *pz.certified && *px.certified;
        e.escalated = pz.escalated || px.escalated;
        out.trace.escalations += std::size_t(pz.escalated) + std::size_t(px.escalated);
        e.svd_rank_budget = budget;
        DenseTensor avg = inv_t * sum_z;
        e.objective = sobj.primal ? sobj.primal(avg) : std::numeric_limits<double>::quiet_NaN();
        bool stop = false;
        if (gap_due(cfg, t) || cfg.tol_gap) {
            double gap = saddle_gap_value(pz.x, w, sobj, cfg.tau);
            e.dual_gap = gap;
            if (gap < out.best_gap) {
                out.best_gap = gap;
                out.best_iteration = t;
                out.x_best = pz.x;
                out.y_best = w;
            }
            stop = cfg.tol_gap && gap < *cfg.tol_gap;
        }
        fill_common(e, cfg, avg, start);
        out.trace.entries.push_back(e);
        if (cfg.observer) cfg.observer(e, avg);
        if (stop || t == cfg.iterations) {
            out.x_avg = std::move(avg);
            out.y_avg = inv_t * sum_w;
        }
        if (stop) break;
    }
    if (cfg.iterations == 0) {
        out.x_avg = x0;
        out.y_avg = y0;
        out.x_best = x0;
        out.y_best = y0;
        out.best_gap = saddle_gap_value(x0, y0, sobj, cfg.tau);
    }
    out.x_last = std::move(x);
    out.y_last = std::move(y);
    return out;
}

}  // namespace tubalkit
