#pragma once

#include <functional>

#include "tubalkit/tensor.hpp"

namespace tubalkit {

// Dual variables live in the same tensor space as the primal here.
using DualPoint = DenseTensor;

struct SmoothObjective {
    std::function<double(const DenseTensor&)> eval;
    std::function<DenseTensor(const DenseTensor&)> grad;
    double beta = 1.0;
};

struct SaddleObjective {
    std::function<double(const DenseTensor&, const DualPoint&)> value;
    std::function<DenseTensor(const DenseTensor&, const DualPoint&)> grad_x;
    std::function<DualPoint(const DenseTensor&, const DualPoint&)> grad_y;
    // Euclidean projection onto the dual set K.
    std::function<DualPoint(const DualPoint&)> project_dual;
    // max over w in K of <w, g>.
    std::function<double(const DualPoint&)> support;
    // Optional f(X) = max over K of F(X, .), used for traces.
    std::function<double(const DenseTensor&)> primal;
    double beta_x = 0.0;
    double beta_y = 0.0;
    double beta_xy = 0.0;
    double beta_yx = 0.0;
};

}  // namespace tubalkit
