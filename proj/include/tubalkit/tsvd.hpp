#pragma once

#include <optional>
#include <vector>

#include "tubalkit/fourier.hpp"
#include "tubalkit/slice_svd.hpp"
#include "tubalkit/tensor.hpp"

namespace tubalkit {

inline constexpr double kDefaultTolRank = 1e-8;

// Per-slice nonincreasing singular values of the Fourier slices.
struct SliceSpectrum {
    std::vector<Eigen::VectorXd> values;

    std::size_t num_slices() const { return values.size(); }
    double sigma1() const;
    // Numerical rank of each slice: count of values > tol * sigma1().
    std::vector<std::size_t> ranks(double tol_rank = kDefaultTolRank) const;
    // Sum over slices of all values, divided by N.
    double nuclear() const;
};

// Per-slice SVD of all Fourier slices with partners forced to conjugates.
struct FourierSvd {
    Dims dims;
    std::vector<SliceSvd> slices;

    SliceSpectrum spectrum() const;
};

// Full thin SVDs (rank = nullopt) or the leading `rank` triplets per slice.
FourierSvd fourier_svd(const FourierSlices& s, std::optional<std::size_t> rank = std::nullopt,
                       const TruncatedSvdOptions& opts = TruncatedSvdOptions{});
SliceSpectrum fourier_spectrum(const FourierSlices& s);
SliceSpectrum slice_spectrum(const DenseTensor& x);

struct TsvdFactors {
    DenseTensor u;  // n1 x k x n3..nd
    DenseTensor s;  // k x k x n3..nd, f-diagonal
    DenseTensor v;  // n2 x k x n3..nd
    FourierSlices u_hat, s_hat, v_hat;

    std::size_t width() const { return u.n2(); }
    // u * s * v^T
    DenseTensor reconstruct() const;
};

TsvdFactors tsvd(const DenseTensor& x);
TsvdFactors rank_r_tsvd(const DenseTensor& x, std::size_t r);
TsvdFactors skinny_tsvd(const DenseTensor& x, double tol_rank = kDefaultTolRank);
// Assembles real factors of the given width from per-slice SVDs.
TsvdFactors factors_from_svd(const FourierSvd& svd, std::size_t width, const std::vector<std::size_t>& keep);

std::size_t tubal_rank(const DenseTensor& x, double tol_rank = kDefaultTolRank);

struct AverageRank {
    std::size_t rank_sum = 0;
    std::size_t slices = 1;
    double value() const { return double(rank_sum) / double(slices); }
};
AverageRank average_rank(const DenseTensor& x, double tol_rank = kDefaultTolRank);

double spectral_norm(const DenseTensor& x);
double tnn(const DenseTensor& x);

}  // namespace tubalkit
