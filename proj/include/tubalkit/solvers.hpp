#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tubalkit/objectives.hpp"
#include "tubalkit/slice_svd.hpp"
#include "tubalkit/tensor.hpp"

namespace tubalkit {

enum class ProjectionKind { Full, TruncatedCertified, TruncatedUnchecked };

struct ProjectionMode {
    ProjectionKind kind = ProjectionKind::Full;
    std::size_t rank = 0;
    // Full mode only: evaluate the certificate at this rank from the full spectrum.
    std::optional<std::size_t> monitor_rank;

    static ProjectionMode full(std::optional<std::size_t> monitor = std::nullopt) {
        return {ProjectionKind::Full, 0, monitor};
    }
    static ProjectionMode certified(std::size_t r) { return {ProjectionKind::TruncatedCertified, r, std::nullopt}; }
    static ProjectionMode unchecked(std::size_t r) { return {ProjectionKind::TruncatedUnchecked, r, std::nullopt}; }
};

std::string to_string(ProjectionKind kind);
ProjectionKind parse_projection_kind(const std::string& s);

struct TraceEntry;
using Observer = std::function<void(const TraceEntry&, const DenseTensor&)>;

struct SolverConfig {
    // Unset means auto: 1/beta for smooth problems, the extragradient rule otherwise.
    std::optional<double> step;
    std::size_t iterations = 800;
    double tau = 1.0;
    ProjectionMode projection;
    // Restart block length of the restarted fast gradient method.
    std::size_t restart = 50;
    // Dual gaps are evaluated every gap_every iterations and at the end (0 disables).
    std::size_t gap_every = 10;
    std::optional<double> tol_gap;
    std::optional<DenseTensor> reference;
    TruncatedSvdOptions svd;
    std::uint64_t seed = 0;
    Observer observer;
};

struct TraceEntry {
    std::size_t iteration = 0;
    // f at the iterate for smooth problems; primal value at the ergodic average for saddles.
    double objective = 0.0;
    std::optional<double> distance;
    std::size_t projection_rank = 0;
    std::optional<bool> certified;
    bool escalated = false;
    // Cumulative number of singular triplets computed.
    std::size_t svd_rank_budget = 0;
    double wall_time = 0.0;
    std::optional<double> dual_gap;
};

struct SolverTrace {
    std::vector<TraceEntry> entries;
    std::size_t escalations = 0;

    // Smallest t0 with a true verdict at every t >= t0.
    std::optional<std::size_t> first_certified_iteration() const;
};

struct SmoothResult {
    DenseTensor x;
    SolverTrace trace;
};

struct SaddleResult {
    // Ergodic averages of the lookahead points.
    DenseTensor x_avg;
    DualPoint y_avg;
    DenseTensor x_last;
    DualPoint y_last;
    // Lookahead pair with the lowest evaluated dual gap.
    DenseTensor x_best;
    DualPoint y_best;
    double best_gap = 0.0;
    std::size_t best_iteration = 0;
    double eta = 0.0;
    SolverTrace trace;
};

// Projection of one point under a projection mode.
struct StepProjection {
    DenseTensor x;
    std::size_t rank = 0;
    std::optional<bool> certified;
    bool escalated = false;
    std::size_t svd_triplets = 0;
};

StepProjection project_step(const DenseTensor& v, double tau, const ProjectionMode& mode,
                            const TruncatedSvdOptions& svd = TruncatedSvdOptions{});

SmoothResult pgd(const SmoothObjective& obj, const SolverConfig& cfg, const DenseTensor& x0);
SmoothResult fista(const SmoothObjective& obj, const SolverConfig& cfg, const DenseTensor& x0);
SmoothResult restarted_fgm(const SmoothObjective& obj, const SolverConfig& cfg, const DenseTensor& x0);

double extragradient_auto_step(const SaddleObjective& sobj);
SaddleResult extragradient(const SaddleObjective& sobj, const SolverConfig& cfg, const DenseTensor& x0,
                           const DualPoint& y0);

// theta_{s+1} = (1 + sqrt(1 + 4 theta_s^2)) / 2
double next_theta(double theta);

}  // namespace tubalkit
