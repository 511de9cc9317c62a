#include "tubalkit/algebra.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "tubalkit/parallel.hpp"

namespace tubalkit {

FourierSlices slice_product(const FourierSlices& a, const FourierSlices& b) {
    if (a.cols() != b.rows()) throw ShapeMismatch("t_product: inner dimensions differ");
    Dims ta(a.dims().begin() + 2, a.dims().end()), tb(b.dims().begin() + 2, b.dims().end());
    if (ta != tb) throw ShapeMismatch("t_product: trailing dimensions differ");
    Dims out_dims = a.dims();
    out_dims[1] = b.cols();
    FourierSlices out(out_dims);
    SlicePairing pairing(out_dims);
    parallel_for(pairing.representatives.size(), [&](std::size_t i) {
        std::size_t k = pairing.representatives[i];
        out.slice(k).noalias() = a.slice(k) * b.slice(k);
        std::size_t p = pairing.partner[k];
        if (p != k) out.slice(p) = out.slice(k).conjugate();
    });
    return out;
}

DenseTensor t_product(const DenseTensor& x, const DenseTensor& y) {
    if (x.order() != y.order()) throw ShapeMismatch("t_product: order mismatch");
    if (x.n2() != y.n1()) throw ShapeMismatch("t_product: inner dimensions differ");
    return ifft_tensor(slice_product(fft_tensor(x), fft_tensor(y)));
}

DenseTensor t_transpose(const DenseTensor& x) {
    Dims dims = x.dims();
    std::swap(dims[0], dims[1]);
    DenseTensor out(dims);
    SlicePairing pairing(x.dims());
    for (std::size_t k = 0; k < x.num_slices(); ++k) {
        std::size_t src = pairing.partner[k];
        for (std::size_t i1 = 0; i1 < x.n1(); ++i1)
            for (std::size_t i2 = 0; i2 < x.n2(); ++i2) out.at(i2, i1, k) = x.at(i1, i2, src);
    }
    return out;
}

Eigen::MatrixXd unfold_mode(const DenseTensor& x, std::size_t mode) {
    const Dims& dims = x.dims();
    std::size_t nj = dims[mode];
    std::size_t cols = nj == 0 ? 0 : x.size() / nj;
    Eigen::MatrixXd m(nj, cols);
    std::size_t below = 1;
    for (std::size_t j = 0; j < mode; ++j) below *= dims[j];
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::size_t lo = i % below;
        std::size_t rest = i / below;
        std::size_t ij = rest % nj;
        std::size_t hi = rest / nj;
        m(ij, lo + below * hi) = x[i];
    }
    return m;
}

DenseTensor mode_product(const DenseTensor& x, const Eigen::MatrixXd& a, std::size_t mode) {
    if (mode >= x.order()) throw ShapeMismatch("mode_product: mode out of range");
    if (static_cast<std::size_t>(a.cols()) != x.dim(mode)) {
        throw ShapeMismatch("mode_product: matrix has " + std::to_string(a.cols()) + " columns, mode has " +
                            std::to_string(x.dim(mode)));
    }
    Eigen::MatrixXd prod = a * unfold_mode(x, mode);
    Dims dims = x.dims();
    dims[mode] = static_cast<std::size_t>(a.rows());
    DenseTensor out(dims);
    std::size_t below = 1;
    for (std::size_t j = 0; j < mode; ++j) below *= dims[j];
    std::size_t nj = dims[mode];
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::size_t lo = i % below;
        std::size_t rest = i / below;
        out[i] = prod(rest % nj, lo + below * (rest / nj));
    }
    return out;
}

Eigen::MatrixXd bcirc_explicit(const DenseTensor& x) {
    const Dims& dims = x.dims();
    std::size_t n = x.num_slices();
    double entries = double(x.n1()) * double(n) * double(x.n2()) * double(n);
    if (entries > double(kBcircEntryLimit)) throw SizeGuard("bcirc too large to materialize");
    Eigen::MatrixXd m(x.n1() * n, x.n2() * n);
    for (std::size_t a = 0; a < n; ++a) {
        auto ia = slice_multi_index(dims, a);
        for (std::size_t b = 0; b < n; ++b) {
            auto ib = slice_multi_index(dims, b);
            std::size_t k = 0, stride = 1;
            for (std::size_t j = 0; j < ia.size(); ++j) {
                std::size_t nj = dims[j + 2];
                k += ((ia[j] + nj - ib[j]) % nj) * stride;
                stride *= nj;
            }
            for (std::size_t i1 = 0; i1 < x.n1(); ++i1)
                for (std::size_t i2 = 0; i2 < x.n2(); ++i2) m(a * x.n1() + i1, b * x.n2() + i2) = x.at(i1, i2, k);
        }
    }
    return m;
}

Eigen::MatrixXd unfold_slices(const DenseTensor& x) {
    std::size_t n = x.num_slices();
    Eigen::MatrixXd m(x.n1() * n, x.n2());
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i1 = 0; i1 < x.n1(); ++i1)
            for (std::size_t i2 = 0; i2 < x.n2(); ++i2) m(k * x.n1() + i1, i2) = x.at(i1, i2, k);
    return m;
}

DenseTensor fold_slices(const Eigen::MatrixXd& m, const Dims& dims) {
    DenseTensor x(dims);
    std::size_t n = x.num_slices();
    if (static_cast<std::size_t>(m.rows()) != x.n1() * n || static_cast<std::size_t>(m.cols()) != x.n2())
        throw ShapeMismatch("fold_slices: matrix shape does not match dims");
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i1 = 0; i1 < x.n1(); ++i1)
            for (std::size_t i2 = 0; i2 < x.n2(); ++i2) x.at(i1, i2, k) = m(k * x.n1() + i1, i2);
    return x;
}

Eigen::MatrixXcd bdiag(const FourierSlices& s) {
    std::size_t n = s.num_slices();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(s.rows() * n, s.cols() * n);
    for (std::size_t k = 0; k < n; ++k) m.block(k * s.rows(), k * s.cols(), s.rows(), s.cols()) = s.slice(k);
    return m;
}

Eigen::MatrixXcd trailing_dft_matrix(const Dims& dims) {
    Eigen::MatrixXcd f = Eigen::MatrixXcd::Ones(1, 1);
    for (std::size_t j = 2; j < dims.size(); ++j) {
        std::size_t nj = dims[j];
        Eigen::MatrixXcd fj(nj, nj);
        for (std::size_t a = 0; a < nj; ++a)
            for (std::size_t b = 0; b < nj; ++b)
                fj(a, b) = std::polar(1.0, -2.0 * std::numbers::pi * double(a * b % nj) / double(nj));
        // Colexicographic order: later dims vary slowest, so they sit on the left.
        Eigen::MatrixXcd next(f.rows() * nj, f.cols() * nj);
        for (std::size_t a = 0; a < nj; ++a)
            for (std::size_t b = 0; b < nj; ++b) next.block(a * f.rows(), b * f.cols(), f.rows(), f.cols()) = fj(a, b) * f;
        f = next;
    }
    return f;
}

}  // namespace tubalkit
