#pragma once

#include <Eigen/Dense>

#include "tubalkit/fourier.hpp"
#include "tubalkit/tensor.hpp"

namespace tubalkit {

// x: n1 x n2 x n3..nd, y: n2 x l x n3..nd.
DenseTensor t_product(const DenseTensor& x, const DenseTensor& y);
// Slicewise product in the Fourier domain.
FourierSlices slice_product(const FourierSlices& a, const FourierSlices& b);

DenseTensor t_transpose(const DenseTensor& x);

// j-mode product x ×_j a with a of shape (m × n_j); mode is 0-based.
DenseTensor mode_product(const DenseTensor& x, const Eigen::MatrixXd& a, std::size_t mode);
// Mode-j matricization, n_j rows.
Eigen::MatrixXd unfold_mode(const DenseTensor& x, std::size_t mode);

// Test oracles. Never used on solver paths.
inline constexpr std::size_t kBcircEntryLimit = 10000000;
Eigen::MatrixXd bcirc_explicit(const DenseTensor& x);
// Stacks frontal slices vertically: (n1 * N) x n2.
Eigen::MatrixXd unfold_slices(const DenseTensor& x);
DenseTensor fold_slices(const Eigen::MatrixXd& m, const Dims& dims);
// Block-diagonal matrix of Fourier slices.
Eigen::MatrixXcd bdiag(const FourierSlices& s);
// F_{nd} ⊗ ... ⊗ F_{n3} with omega = exp(-2 pi i / n).
Eigen::MatrixXcd trailing_dft_matrix(const Dims& dims);

}  // namespace tubalkit
