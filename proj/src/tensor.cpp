#include "tubalkit/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tubalkit {

void validate_dims(const Dims& dims) {
    if (dims.size() < 3) {
        throw ShapeMismatch("tensor order must be at least 3, got " + std::to_string(dims.size()));
    }
    for (std::size_t j = 2; j < dims.size(); ++j) {
        if (dims[j] == 0) throw ShapeMismatch("trailing dimensions must be positive");
    }
}

std::size_t trailing_count(const Dims& dims) {
    std::size_t n = 1;
    for (std::size_t j = 2; j < dims.size(); ++j) n *= dims[j];
    return n;
}

static std::size_t product(const Dims& dims) {
    std::size_t n = 1;
    for (auto v : dims) n *= v;
    return n;
}

DenseTensor::DenseTensor(Dims dims) : dims_(std::move(dims)) {
    validate_dims(dims_);
    data_.assign(product(dims_), 0.0);
}

DenseTensor::DenseTensor(Dims dims, std::vector<double> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
    validate_dims(dims_);
    if (data_.size() != product(dims_)) {
        throw ShapeMismatch("data length " + std::to_string(data_.size()) +
                            " does not match product of dims " + std::to_string(product(dims_)));
    }
}

DenseTensor DenseTensor::identity(std::size_t n, const Dims& trailing) {
    Dims dims{n, n};
    dims.insert(dims.end(), trailing.begin(), trailing.end());
    DenseTensor t(dims);
    for (std::size_t i = 0; i < n; ++i) t.at(i, i, 0) = 1.0;
    return t;
}

std::size_t DenseTensor::num_slices() const { return trailing_count(dims_); }

std::size_t DenseTensor::offset(const std::vector<std::size_t>& idx) const {
    if (idx.size() != dims_.size()) throw ShapeMismatch("index arity mismatch");
    std::size_t off = 0, stride = 1;
    for (std::size_t j = 0; j < dims_.size(); ++j) {
        if (idx[j] >= dims_[j]) throw ShapeMismatch("index out of range");
        off += idx[j] * stride;
        stride *= dims_[j];
    }
    return off;
}

double& DenseTensor::operator()(const std::vector<std::size_t>& idx) { return data_[offset(idx)]; }

double DenseTensor::operator()(const std::vector<std::size_t>& idx) const { return data_[offset(idx)]; }

void require_same_shape(const DenseTensor& a, const DenseTensor& b, const char* what) {
    if (!a.same_shape(b)) throw ShapeMismatch(std::string(what) + ": shape mismatch");
}

DenseTensor& DenseTensor::operator+=(const DenseTensor& o) {
    require_same_shape(*this, o, "operator+=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

DenseTensor& DenseTensor::operator-=(const DenseTensor& o) {
    require_same_shape(*this, o, "operator-=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

DenseTensor& DenseTensor::operator*=(double a) {
    for (auto& v : data_) v *= a;
    return *this;
}

DenseTensor& DenseTensor::axpy(double a, const DenseTensor& o) {
    require_same_shape(*this, o, "axpy");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += a * o.data_[i];
    return *this;
}

void DenseTensor::fill(double v) {
    for (auto& x : data_) x = v;
}

DenseTensor operator+(DenseTensor a, const DenseTensor& b) { return a += b; }
DenseTensor operator-(DenseTensor a, const DenseTensor& b) { return a -= b; }
DenseTensor operator*(double s, DenseTensor a) { return a *= s; }

double inner(const DenseTensor& x, const DenseTensor& y) {
    require_same_shape(x, y, "inner");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double fro_norm(const DenseTensor& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * x[i];
    return std::sqrt(s);
}

double max_abs(const DenseTensor& x) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i]));
    return m;
}

DenseTensor hadamard(const DenseTensor& x, const DenseTensor& y) {
    require_same_shape(x, y, "hadamard");
    DenseTensor out(x.dims());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * y[i];
    return out;
}

}  // namespace tubalkit
