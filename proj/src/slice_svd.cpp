#include <complex>
#include <vector>
#define lapack_complex_double std::complex<double>
#define lapack_complex_float std::complex<float>
#include <lapacke.h>

#include "tubalkit/slice_svd.hpp"

#include "tubalkit/errors.hpp"

#include <algorithm>
#include <limits>
#include <type_traits>
#include <atomic>
#include <cmath>
#include <mutex>
#include <random>
#include <string>

namespace tubalkit {

namespace {

std::atomic<std::size_t> g_dense{0}, g_randomized{0}, g_fallbacks{0};

SliceSvd empty_svd(Eigen::Index m, Eigen::Index n, Eigen::Index k) {
    SliceSvd out;
    out.u = CMatrix::Zero(m, k);
    out.s = Eigen::VectorXd::Zero(k);
    out.v = CMatrix::Zero(n, k);
    return out;
}

SliceSvd truncate(SliceSvd full, Eigen::Index k) {
    SliceSvd out;
    out.u = full.u.leftCols(k);
    out.s = full.s.head(k);
    out.v = full.v.leftCols(k);
    return out;
}

CMatrix orthonormalize(const CMatrix& y) {
    Eigen::HouseholderQR<CMatrix> qr(y);
    return qr.householderQ() * CMatrix::Identity(y.rows(), y.cols());
}

std::once_flag g_blas_once;
std::string g_blas_failure;

// Reconstruction residual of a LAPACK SVD, products evaluated by Eigen.
template <class Mat>
double gesdd_residual(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat a(n, n);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if constexpr (std::is_same_v<typename Mat::Scalar, double>)
            a.data()[i] = u(rng);
        else
            a.data()[i] = cplx(u(rng), u(rng));
    }
    Mat work = a, uu(n, n), vt(n, n);
    Eigen::VectorXd s(n);
    lapack_int info;
    if constexpr (std::is_same_v<typename Mat::Scalar, double>)
        info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', lapack_int(n), lapack_int(n), work.data(), lapack_int(n), s.data(),
                              uu.data(), lapack_int(n), vt.data(), lapack_int(n));
    else
        info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', lapack_int(n), lapack_int(n), work.data(), lapack_int(n), s.data(),
                              uu.data(), lapack_int(n), vt.data(), lapack_int(n));
    if (info != 0) return std::numeric_limits<double>::infinity();
    Mat us = uu * s.asDiagonal();
    return (a - us.lazyProduct(vt)).norm() / s(0);
}

void run_blas_check() {
    for (Eigen::Index n : {64, 200}) {
        double r = std::max(gesdd_residual<Eigen::MatrixXd>(n, 11), gesdd_residual<CMatrix>(n, 13));
        if (!(r < 1e-10)) {
            g_blas_failure = "BLAS/LAPACK self-check failed (SVD residual " + std::to_string(r) + " at n = " +
                             std::to_string(n) + "); with OpenBLAS set " + std::string(kBlasCoreEnv) +
                             "=Haswell or link a different BLAS";
            return;
        }
    }
}

void ensure_blas() {
    std::call_once(g_blas_once, run_blas_check);
    if (!g_blas_failure.empty()) throw NumericalError(g_blas_failure);
}

}  // namespace

void blas_self_check() { ensure_blas(); }

bool is_real(const CMatrix& a) { return a.imag().isZero(0.0); }

namespace {

SliceSvd real_svd(const Eigen::MatrixXd& a) {
    const Eigen::Index m = a.rows(), n = a.cols(), k = std::min(m, n);
    Eigen::MatrixXd work = a, u(m, k), vt(k, n);
    Eigen::VectorXd s(k), superb(std::max<Eigen::Index>(k, 1));
    lapack_int info = LAPACKE_dgesvd(LAPACK_COL_MAJOR, 'S', 'S', lapack_int(m), lapack_int(n), work.data(),
                                     lapack_int(m), s.data(), u.data(), lapack_int(m), vt.data(), lapack_int(k),
                                     superb.data());
    SliceSvd out;
    if (info != 0) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        out.u = svd.matrixU().cast<cplx>();
        out.s = svd.singularValues();
        out.v = svd.matrixV().cast<cplx>();
        return out;
    }
    out.u = u.cast<cplx>();
    out.s = s;
    out.v = vt.transpose().cast<cplx>();
    return out;
}

}  // namespace

SliceSvd dense_svd(const CMatrix& a) {
    const Eigen::Index m = a.rows(), n = a.cols(), k = std::min(m, n);
    if (k == 0) return empty_svd(m, n, 0);
    ensure_blas();
    ++g_dense;
    if (is_real(a)) return real_svd(a.real());
    CMatrix work = a;
    SliceSvd out;
    out.s.resize(k);
    out.u.resize(m, k);
    CMatrix vt(k, n);
    lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', lapack_int(m), lapack_int(n), work.data(), lapack_int(m),
                                     out.s.data(), out.u.data(), lapack_int(m), vt.data(), lapack_int(k));
    if (info != 0) {
        Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        out.u = svd.matrixU();
        out.s = svd.singularValues();
        out.v = svd.matrixV();
        return out;
    }
    out.v = vt.adjoint();
    return out;
}

Eigen::VectorXd dense_singular_values(const CMatrix& a) {
    const Eigen::Index m = a.rows(), n = a.cols(), k = std::min(m, n);
    Eigen::VectorXd s = Eigen::VectorXd::Zero(k);
    if (k == 0) return s;
    ensure_blas();
    ++g_dense;
    lapack_int info;
    if (is_real(a)) {
        Eigen::MatrixXd work = a.real();
        info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', lapack_int(m), lapack_int(n), work.data(), lapack_int(m),
                              s.data(), nullptr, 1, nullptr, 1);
    } else {
        CMatrix work = a;
        info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', lapack_int(m), lapack_int(n), work.data(), lapack_int(m),
                              s.data(), nullptr, 1, nullptr, 1);
    }
    if (info != 0) s = Eigen::JacobiSVD<CMatrix>(a).singularValues();
    return s;
}

namespace {

// Leading k triplets by a dense method; the subset solver is used for complex
// slices when k is a small fraction of the spectrum.
SliceSvd dense_top_k(const CMatrix& a, Eigen::Index k) {
    const Eigen::Index m = a.rows(), n = a.cols(), kmin = std::min(m, n);
    if (4 * k > kmin || is_real(a)) return truncate(dense_svd(a), k);
    ensure_blas();
    ++g_dense;
    CMatrix work = a;
    SliceSvd out;
    Eigen::VectorXd s(kmin);
    out.u.resize(m, k);
    CMatrix vt(k, n);
    lapack_int found = 0;
    std::vector<lapack_int> superb(12 * std::size_t(kmin));
    lapack_int info = LAPACKE_zgesvdx(LAPACK_COL_MAJOR, 'V', 'V', 'I', lapack_int(m), lapack_int(n), work.data(),
                                      lapack_int(m), 0.0, 0.0, 1, lapack_int(k), &found, s.data(), out.u.data(),
                                      lapack_int(m), vt.data(), lapack_int(k), superb.data());
    if (info != 0 || found != lapack_int(k)) {
        --g_dense;
        return truncate(dense_svd(a), k);
    }
    out.s = s.head(k);
    out.v = vt.adjoint();
    return out;
}

}  // namespace

SliceSvd top_k_svd(const CMatrix& a, std::size_t k_req, std::uint64_t seed, const TruncatedSvdOptions& opts) {
    const Eigen::Index m = a.rows(), n = a.cols(), kmin = std::min(m, n);
    const Eigen::Index k = std::min<Eigen::Index>(Eigen::Index(k_req), kmin);
    if (k == 0) return empty_svd(m, n, 0);
    const Eigen::Index block = std::min<Eigen::Index>(k + Eigen::Index(opts.oversample), kmin);
    if (std::size_t(kmin) <= opts.dense_cutoff || 2 * block > kmin) return dense_top_k(a, k);

    const bool real = is_real(a);
    if (a.cwiseAbs2().sum() == 0.0) return empty_svd(m, n, k);
    ++g_randomized;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    CMatrix omega(n, block);
    for (Eigen::Index j = 0; j < block; ++j)
        for (Eigen::Index i = 0; i < n; ++i) omega(i, j) = cplx(normal(rng), real ? 0.0 : normal(rng));

    CMatrix q = orthonormalize(a * omega);
    double prev = 0.0;
    for (std::size_t it = 0; it < opts.max_iterations; ++it) {
        CMatrix w = orthonormalize(a.adjoint() * q);
        q = orthonormalize(a * w);
        CMatrix b = q.adjoint() * a;
        SliceSvd small = dense_svd(b);
        --g_dense;
        SliceSvd cand;
        cand.u = q * small.u.leftCols(k);
        cand.s = small.s.head(k);
        cand.v = small.v.leftCols(k);
        if (cand.s(0) == 0.0) return empty_svd(m, n, k);
        CMatrix resid = a * cand.v - cand.u * cand.s.asDiagonal();
        double worst = resid.colwise().norm().maxCoeff();
        double target = opts.tol * cand.s(0);
        if (worst <= target) return cand;
        // Give up early when the observed contraction cannot reach tol in budget.
        if (it >= 1) {
            double rate = worst / prev;
            double left = double(opts.max_iterations - it - 1);
            if (rate >= 1.0 || std::log(target / worst) / std::log(rate) > left) break;
        }
        prev = worst;
    }
    ++g_fallbacks;
    return dense_top_k(a, k);
}

SvdStats svd_stats() { return SvdStats{g_dense.load(), g_randomized.load(), g_fallbacks.load()}; }

void reset_svd_stats() {
    g_dense = 0;
    g_randomized = 0;
    g_fallbacks = 0;
}

}  // namespace tubalkit
