#include "tubalkit/tsvd.hpp"

#include <algorithm>

#include "tubalkit/algebra.hpp"
#include "tubalkit/parallel.hpp"

namespace tubalkit {

double SliceSpectrum::sigma1() const {
    double m = 0.0;
    for (const auto& v : values)
        if (v.size() > 0) m = std::max(m, v(0));
    return m;
}

std::vector<std::size_t> SliceSpectrum::ranks(double tol_rank) const {
    double cut = tol_rank * sigma1();
    std::vector<std::size_t> out;
    for (const auto& v : values) {
        std::size_t r = 0;
        if (sigma1() > 0.0)
            while (r < std::size_t(v.size()) && v(Eigen::Index(r)) > cut) ++r;
        out.push_back(r);
    }
    return out;
}

double SliceSpectrum::nuclear() const {
    double s = 0.0;
    for (const auto& v : values) s += v.sum();
    return s / double(values.size());
}

SliceSpectrum FourierSvd::spectrum() const {
    SliceSpectrum out;
    for (const auto& sl : slices) out.values.push_back(sl.s);
    return out;
}

FourierSvd fourier_svd(const FourierSlices& s, std::optional<std::size_t> rank, const TruncatedSvdOptions& opts) {
    FourierSvd out;
    out.dims = s.dims();
    out.slices.resize(s.num_slices());
    SlicePairing pairing(s.dims());
    parallel_for(pairing.representatives.size(), [&](std::size_t i) {
        std::size_t k = pairing.representatives[i];
        std::size_t p = pairing.partner[k];
        // Self-paired slices of a real tensor are real.
        CMatrix a = p == k ? CMatrix(s.slice(k).real().cast<cplx>()) : CMatrix(s.slice(k));
        SliceSvd svd = rank ? top_k_svd(a, *rank, 0x9e3779b97f4a7c15ULL ^ (k * 0x100000001b3ULL), opts)
                            : dense_svd(a);
        if (p != k) {
            out.slices[p].u = svd.u.conjugate();
            out.slices[p].s = svd.s;
            out.slices[p].v = svd.v.conjugate();
        }
        out.slices[k] = std::move(svd);
    });
    return out;
}

SliceSpectrum fourier_spectrum(const FourierSlices& s) {
    SliceSpectrum out;
    out.values.resize(s.num_slices());
    SlicePairing pairing(s.dims());
    parallel_for(pairing.representatives.size(), [&](std::size_t i) {
        std::size_t k = pairing.representatives[i];
        std::size_t p = pairing.partner[k];
        out.values[k] = dense_singular_values(p == k ? CMatrix(s.slice(k).real().cast<cplx>()) : CMatrix(s.slice(k)));
        out.values[p] = out.values[k];
    });
    return out;
}

SliceSpectrum slice_spectrum(const DenseTensor& x) { return fourier_spectrum(fft_tensor(x)); }

DenseTensor TsvdFactors::reconstruct() const {
    FourierSlices us = slice_product(u_hat, s_hat);
    FourierSlices vt(Dims([&] {
        Dims d = v_hat.dims();
        std::swap(d[0], d[1]);
        return d;
    }()));
    for (std::size_t k = 0; k < v_hat.num_slices(); ++k) vt.slice(k) = v_hat.slice(k).adjoint();
    return ifft_tensor(slice_product(us, vt));
}

TsvdFactors factors_from_svd(const FourierSvd& svd, std::size_t width, const std::vector<std::size_t>& keep) {
    const Dims& dims = svd.dims;
    Dims du = dims, ds = dims, dv = dims;
    du[1] = width;
    ds[0] = ds[1] = width;
    dv[0] = dims[1];
    dv[1] = width;
    TsvdFactors f;
    f.u_hat = FourierSlices(du);
    f.s_hat = FourierSlices(ds);
    f.v_hat = FourierSlices(dv);
    for (std::size_t k = 0; k < svd.slices.size(); ++k) {
        const auto& sl = svd.slices[k];
        Eigen::Index c = Eigen::Index(std::min<std::size_t>(keep[k], width));
        c = std::min(c, Eigen::Index(sl.s.size()));
        f.u_hat.slice(k).leftCols(c) = sl.u.leftCols(c);
        f.v_hat.slice(k).leftCols(c) = sl.v.leftCols(c);
        for (Eigen::Index i = 0; i < c; ++i) f.s_hat.slice(k)(i, i) = sl.s(i);
    }
    f.u = ifft_tensor(f.u_hat);
    f.s = ifft_tensor(f.s_hat);
    f.v = ifft_tensor(f.v_hat);
    return f;
}

TsvdFactors tsvd(const DenseTensor& x) {
    FourierSvd svd = fourier_svd(fft_tensor(x));
    std::size_t k = std::min(x.n1(), x.n2());
    return factors_from_svd(svd, k, std::vector<std::size_t>(x.num_slices(), k));
}

TsvdFactors rank_r_tsvd(const DenseTensor& x, std::size_t r) {
    if (r > std::min(x.n1(), x.n2())) throw RankOutOfRange("rank_r_tsvd: r exceeds min(n1, n2)");
    FourierSvd svd = fourier_svd(fft_tensor(x), r);
    return factors_from_svd(svd, r, std::vector<std::size_t>(x.num_slices(), r));
}

TsvdFactors skinny_tsvd(const DenseTensor& x, double tol_rank) {
    FourierSvd svd = fourier_svd(fft_tensor(x));
    auto ranks = svd.spectrum().ranks(tol_rank);
    std::size_t width = ranks.empty() ? 0 : *std::max_element(ranks.begin(), ranks.end());
    return factors_from_svd(svd, width, ranks);
}

std::size_t tubal_rank(const DenseTensor& x, double tol_rank) {
    auto ranks = slice_spectrum(x).ranks(tol_rank);
    return ranks.empty() ? 0 : *std::max_element(ranks.begin(), ranks.end());
}

AverageRank average_rank(const DenseTensor& x, double tol_rank) {
    auto ranks = slice_spectrum(x).ranks(tol_rank);
    AverageRank out;
    out.slices = ranks.size();
    for (auto r : ranks) out.rank_sum += r;
    return out;
}

double spectral_norm(const DenseTensor& x) { return slice_spectrum(x).sigma1(); }

double tnn(const DenseTensor& x) { return slice_spectrum(x).nuclear(); }

}  // namespace tubalkit
