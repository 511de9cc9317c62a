#include "tubalkit/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <utility>

namespace tubalkit {

FourierSlices::FourierSlices(Dims dims) : dims_(std::move(dims)) {
    validate_dims(dims_);
    data_.assign(dims_[0] * dims_[1] * trailing_count(dims_), cplx(0.0, 0.0));
}

double FourierSlices::fro_norm() const {
    double s = 0.0;
    for (const auto& v : data_) s += std::norm(v);
    return std::sqrt(s);
}

std::vector<std::size_t> slice_multi_index(const Dims& dims, std::size_t k) {
    std::vector<std::size_t> idx;
    for (std::size_t j = 2; j < dims.size(); ++j) {
        idx.push_back(k % dims[j]);
        k /= dims[j];
    }
    return idx;
}

SlicePairing::SlicePairing(const Dims& dims) {
    std::size_t n = trailing_count(dims);
    partner.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        auto idx = slice_multi_index(dims, k);
        std::size_t p = 0, stride = 1;
        for (std::size_t j = 0; j < idx.size(); ++j) {
            std::size_t nj = dims[j + 2];
            p += ((nj - idx[j]) % nj) * stride;
            stride *= nj;
        }
        partner[k] = p;
        if (p >= k) representatives.push_back(k);
    }
}

namespace {

class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(const Dims& dims, int sign) {
        std::lock_guard<std::mutex> lock(mu_);
        auto key = std::make_pair(dims, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;

        std::vector<fftw_iodim> tdims;
        std::size_t stride = dims[0] * dims[1];
        for (std::size_t j = 2; j < dims.size(); ++j) {
            fftw_iodim d;
            d.n = static_cast<int>(dims[j]);
            d.is = d.os = static_cast<int>(stride);
            tdims.push_back(d);
            stride *= dims[j];
        }
        fftw_iodim many;
        many.n = static_cast<int>(dims[0] * dims[1]);
        many.is = many.os = 1;
        auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * stride));
        fftw_plan plan = fftw_plan_guru_dft(static_cast<int>(tdims.size()), tdims.data(), 1, &many, buf,
                                            buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buf);
        if (!plan) throw NumericalError("fftw planning failed");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mu_;
    std::map<std::pair<Dims, int>, fftw_plan> plans_;
};

void transform(Dims dims, cplx* data, int sign) {
    if (dims[0] * dims[1] == 0) return;
    fftw_plan plan = PlanCache::instance().get(dims, sign);
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan, p, p);
}

}  // namespace

FourierSlices fft_tensor(const DenseTensor& x) {
    FourierSlices s(x.dims());
    cplx* out = s.data();
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = cplx(x[i], 0.0);
    transform(x.dims(), out, FFTW_FORWARD);
    return s;
}

DenseTensor ifft_tensor(const FourierSlices& s, double tol_sym) {
    std::vector<cplx> work(s.data(), s.data() + s.size());
    transform(s.dims(), work.data(), FFTW_BACKWARD);
    double scale = 1.0 / static_cast<double>(s.num_slices());
    double max_imag = 0.0;
    DenseTensor x(s.dims());
    for (std::size_t i = 0; i < work.size(); ++i) {
        x[i] = work[i].real() * scale;
        max_imag = std::max(max_imag, std::abs(work[i].imag() * scale));
    }
    double limit = tol_sym * s.fro_norm();
    if (max_imag > limit) {
        std::ostringstream msg;
        msg << "inverse transform is not real: max imaginary part " << max_imag << " exceeds " << limit;
        throw SymmetryViolation(msg.str());
    }
    return x;
}

double symmetry_defect(const FourierSlices& s) {
    SlicePairing pairing(s.dims());
    double worst = 0.0;
    for (std::size_t k = 0; k < s.num_slices(); ++k) {
        auto a = s.slice(k);
        auto b = s.slice(pairing.partner[k]);
        if (a.size() == 0) continue;
        worst = std::max(worst, (a - b.conjugate()).cwiseAbs().maxCoeff());
    }
    return worst;
}

}  // namespace tubalkit
