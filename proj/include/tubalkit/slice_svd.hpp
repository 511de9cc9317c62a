#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "tubalkit/fourier.hpp"

namespace tubalkit {

// Thin SVD of one complex slice: a = u * diag(s) * v^H, s nonincreasing.
struct SliceSvd {
    CMatrix u;
    Eigen::VectorXd s;
    CMatrix v;
};

// Real input (zero imaginary part) takes a real LAPACK path and returns real factors.
SliceSvd dense_svd(const CMatrix& a);
bool is_real(const CMatrix& a);
Eigen::VectorXd dense_singular_values(const CMatrix& a);

struct TruncatedSvdOptions {
    std::size_t oversample = 10;
    std::size_t max_iterations = 30;
    // Residual ||A v_i - s_i u_i|| must fall below tol * s_1.
    double tol = 1e-12;
    // Slices with min dimension at or below this use the dense path.
    std::size_t dense_cutoff = 160;
};

// Leading k singular triplets. Uses randomized subspace iteration with a
// seeded Gaussian start when that is cheaper, else dense SVD truncated.
SliceSvd top_k_svd(const CMatrix& a, std::size_t k, std::uint64_t seed,
                   const TruncatedSvdOptions& opts = TruncatedSvdOptions{});

// OpenBLAS reads this variable at load time to choose its kernels.
inline constexpr const char* kBlasCoreEnv = "OPENBLAS_CORETYPE";

// Runs once per process before the first LAPACK call; throws NumericalError
// when a reference SVD fails to reconstruct its input.
void blas_self_check();

// Counters for tests and benchmarks.
struct SvdStats {
    std::size_t dense_calls = 0;
    std::size_t randomized_calls = 0;
    std::size_t randomized_fallbacks = 0;
};
SvdStats svd_stats();
void reset_svd_stats();

}  // namespace tubalkit
