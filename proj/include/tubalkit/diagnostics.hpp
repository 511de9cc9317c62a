#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tubalkit/objectives.hpp"
#include "tubalkit/tensor.hpp"
#include "tubalkit/tsvd.hpp"

namespace tubalkit {

// Relative tolerance for counting ties with the top singular value.
inline constexpr double kTieTolerance = 1e-8;

struct TopMultiplicity {
    double sigma1 = 0.0;
    // Count of values tied with the global sigma1 over all slices.
    std::size_t total = 0;
    // Largest per-slice multiplicity of that slice's own sigma1.
    std::size_t max_per_slice = 0;
    // Number of nonzero slices.
    std::size_t nnzb = 0;
};

TopMultiplicity top_multiplicity(const SliceSpectrum& spectrum, double tie = kTieTolerance);

double dual_gap_smooth(const DenseTensor& x, const DenseTensor& grad, double tau);
double dual_gap_saddle(const DenseTensor& z, const DualPoint& w, const SaddleObjective& sobj, double tau);
// Same values without the feasibility check, for solver loops.
double smooth_gap_value(const DenseTensor& x, const DenseTensor& grad, double tau);
double saddle_gap_value(const DenseTensor& z, const DualPoint& w, const SaddleObjective& sobj, double tau);

// argmax over the TNN ball of <-Z, grad>, built from the top singular pairs.
DenseTensor dual_gap_maximizer(const DenseTensor& grad, double tau, double tie = kTieTolerance);

double gsc_delta(const SliceSpectrum& spectrum, std::size_t r);
double gsc_delta(const DenseTensor& grad, std::size_t r);

double sc_measure_smooth(const DenseTensor& x_star, const DenseTensor& grad, double tol_rank = kDefaultTolRank);

struct AlignmentReport {
    bool passed = false;
    double tol = 0.0;
    // (max - min) / max of the top values across nonzero slices.
    double sigma1_spread = 0.0;
    // Largest sine of the principal angle between X slice ranges and the
    // top singular subspace of the gradient slice.
    double max_angle = 0.0;
    std::size_t nnzb = 0;
};

AlignmentReport alignment_check(const DenseTensor& x_star, const DenseTensor& grad, double tol,
                                double tol_rank = kDefaultTolRank);

double radius_bound_smooth(const DenseTensor& grad, std::size_t r, double eta, double beta);
double radius_bound_spectral(const DenseTensor& grad, std::size_t r, double eta, double beta2);
double radius_bound_saddle(const DenseTensor& grad_x, std::size_t r, double eta, double beta_x, double beta_xy);

struct ScReport {
    double sigma1_global = 0.0;
    std::vector<double> slice_sigma1;
    std::vector<double> slice_sigma_next;
    double sc_measure = 0.0;
    std::map<std::size_t, double> delta_r;
    std::size_t sigma1_multiplicity = 0;
    std::size_t sigma1_max_multiplicity = 0;
    std::size_t nnzb = 0;
    double top_spread = 0.0;
    std::optional<double> dual_gap;
    std::optional<double> radius_frobenius;
    std::optional<double> radius_spectral;

    std::string to_json(int indent = 2) const;
};

struct ScReportOptions {
    std::vector<std::size_t> ranks;
    std::optional<double> dual_gap;
    // Radius bounds are filled for the first entry of `ranks` when set.
    std::optional<double> eta;
    std::optional<double> beta;
    std::optional<double> beta2;
    double tol_rank = kDefaultTolRank;
};

ScReport sc_report(const DenseTensor& x_star, const DenseTensor& grad, const ScReportOptions& opts = {});

}  // namespace tubalkit
