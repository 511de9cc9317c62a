#include "tubalkit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "tubalkit/fourier.hpp"

namespace tubalkit {

namespace {

void require_feasible(const DenseTensor& x, double tau) {
    double t = tnn(x);
    if (t > tau * (1.0 + 1e-8) + 1e-14) throw InfeasiblePoint("point lies outside the TNN ball");
}

// sigma1(G) - max_k sigma_{q+1}(G_k), q 0-based; slices shorter than q+1 count as 0.
double delta_unchecked(const SliceSpectrum& spec, std::size_t q) {
    double next = 0.0;
    for (const auto& v : spec.values)
        if (Eigen::Index(q) < v.size()) next = std::max(next, v(Eigen::Index(q)));
    return spec.sigma1() - next;
}

std::size_t min_dim(const DenseTensor& g) { return std::min(g.n1(), g.n2()); }

// Shared max-of-two-fractions factor of the Frobenius radius bounds.
double radius_core(const SliceSpectrum& spec, std::size_t r, std::size_t mindim) {
    TopMultiplicity m = top_multiplicity(spec);
    if (m.sigma1 == 0.0) return 0.0;
    if (r < m.max_per_slice || r >= mindim) throw RankOutOfRange("radius bound needs #sigma1max <= r < min(n1, n2)");
    double mm = double(m.max_per_slice);
    double tail = std::sqrt(mm * double(m.nnzb)) / double(m.total);
    double a = gsc_delta(spec, r) / (1.0 + tail);
    double b = delta_unchecked(spec, r - m.max_per_slice + 1) / (1.0 / std::sqrt(mm) + tail);
    return std::max(a, b);
}

}  // namespace

TopMultiplicity top_multiplicity(const SliceSpectrum& spectrum, double tie) {
    TopMultiplicity out;
    out.sigma1 = spectrum.sigma1();
    if (out.sigma1 == 0.0) return out;
    double global_cut = out.sigma1 * (1.0 - tie);
    for (const auto& v : spectrum.values) {
        if (v.size() == 0 || v(0) <= kDefaultTolRank * out.sigma1) continue;
        ++out.nnzb;
        double own_cut = v(0) * (1.0 - tie);
        std::size_t own = 0;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            if (v(i) >= global_cut) ++out.total;
            if (v(i) >= own_cut) ++own;
        }
        out.max_per_slice = std::max(out.max_per_slice, own);
    }
    return out;
}

double smooth_gap_value(const DenseTensor& x, const DenseTensor& grad, double tau) {
    return inner(x, grad) + tau * spectral_norm(grad);
}

double saddle_gap_value(const DenseTensor& z, const DualPoint& w, const SaddleObjective& sobj, double tau) {
    DenseTensor gx = sobj.grad_x(z, w);
    DualPoint gy = sobj.grad_y(z, w);
    return inner(z, gx) + tau * spectral_norm(gx) + sobj.support(gy) - inner(w, gy);
}

double dual_gap_smooth(const DenseTensor& x, const DenseTensor& grad, double tau) {
    require_same_shape(x, grad, "dual_gap_smooth");
    require_feasible(x, tau);
    return smooth_gap_value(x, grad, tau);
}

double dual_gap_saddle(const DenseTensor& z, const DualPoint& w, const SaddleObjective& sobj, double tau) {
    require_feasible(z, tau);
    if (fro_norm(sobj.project_dual(w) - w) > 1e-10 * std::max(1.0, fro_norm(w)))
        throw InfeasiblePoint("dual point lies outside K");
    return saddle_gap_value(z, w, sobj, tau);
}

DenseTensor dual_gap_maximizer(const DenseTensor& grad, double tau, double tie) {
    FourierSvd svd = fourier_svd(fft_tensor(grad));
    SliceSpectrum spec = svd.spectrum();
    TopMultiplicity m = top_multiplicity(spec, tie);
    FourierSlices z(grad.dims());
    if (m.total == 0) return ifft_tensor(z);
    double scale = -tau * double(grad.num_slices()) / double(m.total);
    double cut = m.sigma1 * (1.0 - tie);
    for (std::size_t k = 0; k < svd.slices.size(); ++k) {
        const auto& sl = svd.slices[k];
        Eigen::Index c = 0;
        while (c < sl.s.size() && sl.s(c) >= cut) ++c;
        if (c > 0) z.slice(k).noalias() = scale * sl.u.leftCols(c) * sl.v.leftCols(c).adjoint();
    }
    return ifft_tensor(z);
}

double gsc_delta(const SliceSpectrum& spectrum, std::size_t r) {
    TopMultiplicity m = top_multiplicity(spectrum);
    std::size_t len = 0;
    for (const auto& v : spectrum.values) len = std::max(len, std::size_t(v.size()));
    if (r < m.max_per_slice || r >= len) throw RankOutOfRange("delta(r) needs #sigma1max <= r < min(n1, n2)");
    return delta_unchecked(spectrum, r);
}

double gsc_delta(const DenseTensor& grad, std::size_t r) {
    if (r >= min_dim(grad)) throw RankOutOfRange("delta(r) needs r < min(n1, n2)");
    return gsc_delta(slice_spectrum(grad), r);
}

double sc_measure_smooth(const DenseTensor& x_star, const DenseTensor& grad, double tol_rank) {
    require_same_shape(x_star, grad, "sc_measure_smooth");
    auto ranks = slice_spectrum(x_star).ranks(tol_rank);
    SliceSpectrum g = slice_spectrum(grad);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < g.values.size(); ++k) {
        const auto& v = g.values[k];
        if (v.size() == 0) return 0.0;
        double next = Eigen::Index(ranks[k]) < v.size() ? v(Eigen::Index(ranks[k])) : 0.0;
        best = std::min(best, v(0) - next);
    }
    return std::isfinite(best) ? best : 0.0;
}

AlignmentReport alignment_check(const DenseTensor& x_star, const DenseTensor& grad, double tol, double tol_rank) {
    require_same_shape(x_star, grad, "alignment_check");
    AlignmentReport out;
    out.tol = tol;
    FourierSvd gs = fourier_svd(fft_tensor(grad));
    FourierSvd xs = fourier_svd(fft_tensor(x_star));
    SliceSpectrum gspec = gs.spectrum();
    auto xranks = xs.spectrum().ranks(tol_rank);
    double s1 = gspec.sigma1();
    if (s1 == 0.0) {
        out.passed = true;
        return out;
    }
    double hi = 0.0, lo = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < gs.slices.size(); ++k) {
        const auto& g = gs.slices[k];
        if (g.s.size() == 0 || g.s(0) <= tol_rank * s1) continue;
        ++out.nnzb;
        hi = std::max(hi, g.s(0));
        lo = std::min(lo, g.s(0));
        Eigen::Index r = Eigen::Index(xranks[k]);
        if (r == 0) continue;
        Eigen::Index c = 0;
        while (c < g.s.size() && g.s(c) >= s1 * (1.0 - tol)) ++c;
        if (c < r) {
            out.max_angle = 1.0;
            continue;
        }
        CMatrix ux = xs.slices[k].u.leftCols(r);
        CMatrix ug = g.u.leftCols(c);
        CMatrix resid = ux - ug * (ug.adjoint() * ux);
        double sine = dense_singular_values(resid)(0);
        out.max_angle = std::max(out.max_angle, std::min(1.0, sine));
    }
    out.sigma1_spread = out.nnzb ? (hi - lo) / hi : 0.0;
    out.passed = out.sigma1_spread <= tol && out.max_angle <= tol;
    return out;
}

double radius_bound_smooth(const DenseTensor& grad, std::size_t r, double eta, double beta) {
    double n = double(grad.num_slices());
    return eta / (std::sqrt(n) * (1.0 + eta * beta)) * radius_core(slice_spectrum(grad), r, min_dim(grad));
}

double radius_bound_spectral(const DenseTensor& grad, std::size_t r, double eta, double beta2) {
    return eta * gsc_delta(grad, r) / (2.0 * (1.0 + eta * beta2));
}

double radius_bound_saddle(const DenseTensor& grad_x, std::size_t r, double eta, double beta_x, double beta_xy) {
    double n = double(grad_x.num_slices());
    double k = 1.0 + std::sqrt(2.0) * eta * std::max(beta_x, beta_xy);
    return eta / (std::sqrt(n) * k) * radius_core(slice_spectrum(grad_x), r, min_dim(grad_x));
}

ScReport sc_report(const DenseTensor& x_star, const DenseTensor& grad, const ScReportOptions& opts) {
    require_same_shape(x_star, grad, "sc_report");
    ScReport rep;
    SliceSpectrum g = slice_spectrum(grad);
    auto ranks = slice_spectrum(x_star).ranks(opts.tol_rank);
    TopMultiplicity m = top_multiplicity(g);
    rep.sigma1_global = m.sigma1;
    rep.sigma1_multiplicity = m.total;
    rep.sigma1_max_multiplicity = m.max_per_slice;
    rep.nnzb = m.nnzb;
    double hi = 0.0, lo = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < g.values.size(); ++k) {
        const auto& v = g.values[k];
        double top = v.size() ? v(0) : 0.0;
        double next = Eigen::Index(ranks[k]) < v.size() ? v(Eigen::Index(ranks[k])) : 0.0;
        rep.slice_sigma1.push_back(top);
        rep.slice_sigma_next.push_back(next);
        if (top > kDefaultTolRank * m.sigma1) {
            hi = std::max(hi, top);
            lo = std::min(lo, top);
        }
    }
    rep.top_spread = hi > 0.0 ? (hi - lo) / hi : 0.0;
    rep.sc_measure = sc_measure_smooth(x_star, grad, opts.tol_rank);
    for (std::size_t r : opts.ranks) {
        try {
            rep.delta_r[r] = gsc_delta(g, r);
        } catch (const RankOutOfRange&) {
            // r below the top multiplicity: no value reported.
        }
    }
    rep.dual_gap = opts.dual_gap;
    if (!opts.ranks.empty() && opts.eta && rep.delta_r.count(opts.ranks.front())) {
        std::size_t r = opts.ranks.front();
        if (opts.beta) rep.radius_frobenius = radius_bound_smooth(grad, r, *opts.eta, *opts.beta);
        if (opts.beta2) rep.radius_spectral = radius_bound_spectral(grad, r, *opts.eta, *opts.beta2);
    }
    return rep;
}

std::string ScReport::to_json(int indent) const {
    nlohmann::json j;
    j["sc_measure"] = sc_measure;
    nlohmann::json d = nlohmann::json::object();
    for (const auto& [r, v] : delta_r) d[std::to_string(r)] = v;
    j["delta_r"] = d;
    j["dual_gap"] = dual_gap ? nlohmann::json(*dual_gap) : nlohmann::json(nullptr);
    j["nnzb"] = nnzb;
    j["sigma1_multiplicity"] = sigma1_multiplicity;
    j["sigma1_max_multiplicity"] = sigma1_max_multiplicity;
    j["sigma1_global"] = sigma1_global;
    j["top_spread"] = top_spread;
    j["radius_frobenius"] = radius_frobenius ? nlohmann::json(*radius_frobenius) : nlohmann::json(nullptr);
    j["radius_spectral"] = radius_spectral ? nlohmann::json(*radius_spectral) : nlohmann::json(nullptr);
    j["slice_sigma1"] = slice_sigma1;
    j["slice_sigma_next"] = slice_sigma_next;
    return j.dump(indent);
}

}  // namespace tubalkit
