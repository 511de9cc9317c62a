#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "tubalkit/errors.hpp"

namespace tubalkit {

using Dims = std::vector<std::size_t>;

// Order-d real tensor, first index fastest.
class DenseTensor {
public:
    DenseTensor() = default;
    explicit DenseTensor(Dims dims);
    DenseTensor(Dims dims, std::vector<double> data);

    static DenseTensor zeros(const Dims& dims) { return DenseTensor(dims); }
    // Identity tensor: first frontal slice I_n, all others zero.
    static DenseTensor identity(std::size_t n, const Dims& trailing);

    const Dims& dims() const { return dims_; }
    std::size_t order() const { return dims_.size(); }
    std::size_t dim(std::size_t j) const { return dims_[j]; }
    std::size_t n1() const { return dims_[0]; }
    std::size_t n2() const { return dims_[1]; }
    // Number of frontal slices N = n3 * ... * nd.
    std::size_t num_slices() const;
    std::size_t slice_size() const { return dims_[0] * dims_[1]; }
    std::size_t size() const { return data_.size(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }
    double& at(std::size_t i1, std::size_t i2, std::size_t k) {
        return data_[i1 + dims_[0] * (i2 + dims_[1] * k)];
    }
    double at(std::size_t i1, std::size_t i2, std::size_t k) const {
        return data_[i1 + dims_[0] * (i2 + dims_[1] * k)];
    }
    double& operator()(const std::vector<std::size_t>& idx);
    double operator()(const std::vector<std::size_t>& idx) const;

    DenseTensor& operator+=(const DenseTensor& o);
    DenseTensor& operator-=(const DenseTensor& o);
    DenseTensor& operator*=(double a);
    // this += a * o
    DenseTensor& axpy(double a, const DenseTensor& o);
    void fill(double v);

    bool same_shape(const DenseTensor& o) const { return dims_ == o.dims_; }

private:
    std::size_t offset(const std::vector<std::size_t>& idx) const;

    Dims dims_;
    std::vector<double> data_;
};

DenseTensor operator+(DenseTensor a, const DenseTensor& b);
DenseTensor operator-(DenseTensor a, const DenseTensor& b);
DenseTensor operator*(double s, DenseTensor a);

void validate_dims(const Dims& dims);
std::size_t trailing_count(const Dims& dims);
void require_same_shape(const DenseTensor& a, const DenseTensor& b, const char* what);

double inner(const DenseTensor& x, const DenseTensor& y);
double fro_norm(const DenseTensor& x);
double max_abs(const DenseTensor& x);
// Elementwise product.
DenseTensor hadamard(const DenseTensor& x, const DenseTensor& y);

}  // namespace tubalkit
