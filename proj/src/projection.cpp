#include "tubalkit/projection.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "tubalkit/fourier.hpp"

namespace tubalkit {

std::size_t ProjectionResult::rank() const {
    return active_rank_per_slice.empty()
               ? 0
               : *std::max_element(active_rank_per_slice.begin(), active_rank_per_slice.end());
}

double water_fill_threshold(std::vector<double> values, double target) {
    std::sort(values.begin(), values.end(), std::greater<double>());
    double total = 0.0;
    for (double v : values) total += v;
    if (total <= target) return 0.0;
    if (target <= 0.0) return values.empty() ? 0.0 : values.front();
    double prefix = 0.0, sigma = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j) {
        prefix += values[j];
        double cand = (prefix - target) / double(j + 1);
        if (values[j] > cand)
            sigma = cand;
        else
            break;
    }
    return std::max(sigma, 0.0);
}

namespace {

// Soft-thresholds every slice at sigma using only the supplied triplets.
ProjectionResult threshold_slices(const FourierSvd& svd, double sigma) {
    ProjectionResult out;
    FourierSlices y(svd.dims);
    for (std::size_t k = 0; k < svd.slices.size(); ++k) {
        const auto& sl = svd.slices[k];
        Eigen::Index c = 0;
        while (c < sl.s.size() && sl.s(c) > sigma) ++c;
        out.active_rank_per_slice.push_back(std::size_t(c));
        if (c == 0) continue;
        Eigen::VectorXd d = (sl.s.head(c).array() - sigma).matrix();
        y.slice(k).noalias() = sl.u.leftCols(c) * d.asDiagonal() * sl.v.leftCols(c).adjoint();
    }
    out.projected = ifft_tensor(y);
    out.threshold = sigma;
    return out;
}

std::vector<double> gather(const FourierSvd& svd, Eigen::Index limit) {
    std::vector<double> all;
    for (const auto& sl : svd.slices) {
        Eigen::Index c = std::min(limit, Eigen::Index(sl.s.size()));
        for (Eigen::Index i = 0; i < c; ++i) all.push_back(sl.s(i));
    }
    return all;
}

}  // namespace

ProjectionResult project_from_svd(const FourierSvd& svd, double tau, const DenseTensor& source) {
    if (tau < 0.0) throw NegativeRadius("TNN radius must be nonnegative");
    double n = double(svd.slices.size());
    auto all = gather(svd, std::numeric_limits<Eigen::Index>::max());
    double total = 0.0;
    for (double v : all) total += v;
    if (total / n <= tau) {
        ProjectionResult out;
        out.projected = source;
        out.threshold = 0.0;
        out.active_rank_per_slice = svd.spectrum().ranks(kDefaultTolRank);
        return out;
    }
    return threshold_slices(svd, water_fill_threshold(std::move(all), tau * n));
}

ProjectionResult project_tnn(const DenseTensor& x, double tau) {
    if (tau < 0.0) throw NegativeRadius("TNN radius must be nonnegative");
    return project_from_svd(fourier_svd(fft_tensor(x)), tau, x);
}

CertificateResult certificate_check(const SliceSpectrum& spectrum, double tau, std::size_t r) {
    CertificateResult out;
    double s1 = spectrum.sigma1();
    double next_max = 0.0;
    for (const auto& v : spectrum.values) {
        if (std::size_t(v.size()) < r + 1) throw InsufficientSpectrum("certificate needs r+1 singular values per slice");
        next_max = std::max(next_max, v(Eigen::Index(r)));
    }
    double cut = next_max + 1e-12 * s1;
    double value = 0.0;
    for (const auto& v : spectrum.values) {
        for (Eigen::Index i = 0; i <= Eigen::Index(r) && v(i) > cut; ++i) value += v(i) - next_max;
    }
    out.value = value / double(spectrum.values.size());
    out.sigma_next_max = next_max;
    out.holds = out.value >= tau;
    return out;
}

ProjectionResult truncated_project_tnn(const DenseTensor& x, double tau, std::size_t r,
                                       const TruncatedSvdOptions& opts) {
    if (tau < 0.0) throw NegativeRadius("TNN radius must be nonnegative");
    if (r >= std::min(x.n1(), x.n2())) throw RankOutOfRange("truncated projection needs r < min(n1, n2)");
    FourierSvd svd = fourier_svd(fft_tensor(x), r + 1, opts);
    CertificateResult cert = certificate_check(svd.spectrum(), tau, r);
    double n = double(svd.slices.size());
    for (auto& sl : svd.slices) {
        sl.u.conservativeResize(Eigen::NoChange, Eigen::Index(r));
        sl.v.conservativeResize(Eigen::NoChange, Eigen::Index(r));
        sl.s.conservativeResize(Eigen::Index(r));
    }
    ProjectionResult out = threshold_slices(svd, water_fill_threshold(gather(svd, Eigen::Index(r)), tau * n));
    out.certificate_value = cert.value;
    if (cert.holds) out.certificate_rank = r;
    return out;
}

DenseTensor project_linf(const DenseTensor& y, double bound) {
    if (!(bound > 0.0)) throw ShapeMismatch("project_linf: bound must be positive");
    DenseTensor out = y;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], -bound, bound);
    return out;
}

}  // namespace tubalkit
