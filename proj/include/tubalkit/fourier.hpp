#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "tubalkit/tensor.hpp"

namespace tubalkit {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CMap = Eigen::Map<CMatrix>;
using CConstMap = Eigen::Map<const CMatrix>;

inline constexpr double kDefaultTolSym = 1e-10;

// Complex frontal slices of fft(x), slice k stored contiguously column-major
// at offset k * n1 * n2.
class FourierSlices {
public:
    FourierSlices() = default;
    explicit FourierSlices(Dims dims);

    const Dims& dims() const { return dims_; }
    std::size_t rows() const { return dims_[0]; }
    std::size_t cols() const { return dims_[1]; }
    std::size_t num_slices() const { return trailing_count(dims_); }

    CMap slice(std::size_t k) {
        return CMap(data_.data() + k * rows() * cols(), Eigen::Index(rows()), Eigen::Index(cols()));
    }
    CConstMap slice(std::size_t k) const {
        return CConstMap(data_.data() + k * rows() * cols(), Eigen::Index(rows()), Eigen::Index(cols()));
    }

    cplx* data() { return data_.data(); }
    const cplx* data() const { return data_.data(); }
    std::size_t size() const { return data_.size(); }

    double fro_norm() const;

private:
    Dims dims_;
    std::vector<cplx> data_;
};

// Conjugate partner of every slice: trailing index i_j maps to (n_j - i_j) mod n_j.
struct SlicePairing {
    std::vector<std::size_t> partner;
    // Slices whose SVD is computed; partner[k] >= k for these.
    std::vector<std::size_t> representatives;

    explicit SlicePairing(const Dims& dims);
    bool is_representative(std::size_t k) const { return partner[k] >= k; }
};

// Colexicographic trailing multi-index of slice k.
std::vector<std::size_t> slice_multi_index(const Dims& dims, std::size_t k);

FourierSlices fft_tensor(const DenseTensor& x);
DenseTensor ifft_tensor(const FourierSlices& s, double tol_sym = kDefaultTolSym);

// Max over slices of |S_k - conj(S_partner(k))|.
double symmetry_defect(const FourierSlices& s);

}  // namespace tubalkit
