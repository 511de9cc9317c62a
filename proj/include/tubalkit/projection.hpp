#pragma once

#include <optional>
#include <vector>

#include "tubalkit/tensor.hpp"
#include "tubalkit/tsvd.hpp"

namespace tubalkit {

struct ProjectionResult {
    DenseTensor projected;
    double threshold = 0.0;
    std::vector<std::size_t> active_rank_per_slice;
    // Set by the truncated path when the certificate holds.
    std::optional<std::size_t> certificate_rank;
    // Condition value of the certificate, truncated path only.
    std::optional<double> certificate_value;

    std::size_t rank() const;
};

struct CertificateResult {
    bool holds = false;
    double value = 0.0;
    double sigma_next_max = 0.0;
};

// Water-filling threshold for sum_i max(0, s_i - sigma) = target, values in
// any order. Returns 0 when the sum is already within target.
double water_fill_threshold(std::vector<double> values, double target);

ProjectionResult project_tnn(const DenseTensor& x, double tau);
// Projection from precomputed per-slice SVDs; `source` is returned unchanged when feasible.
ProjectionResult project_from_svd(const FourierSvd& svd, double tau, const DenseTensor& source);

ProjectionResult truncated_project_tnn(const DenseTensor& x, double tau, std::size_t r,
                                       const TruncatedSvdOptions& opts = TruncatedSvdOptions{});

CertificateResult certificate_check(const SliceSpectrum& spectrum, double tau, std::size_t r);

DenseTensor project_linf(const DenseTensor& y, double bound);

}  // namespace tubalkit
