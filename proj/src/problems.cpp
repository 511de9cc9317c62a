#include "tubalkit/problems.hpp"

#include <cmath>
#include <fstream>
#include <memory>

#include <json.hpp>

#include "tubalkit/algebra.hpp"
#include "tubalkit/io.hpp"
#include "tubalkit/projection.hpp"
#include "tubalkit/random.hpp"
#include "tubalkit/tsvd.hpp"

namespace tubalkit {

namespace {

DenseTensor gaussian(const Dims& dims, Rng& rng, double stddev) {
    DenseTensor x(dims);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = stddev * rng.normal();
    return x;
}

Eigen::MatrixXd gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
    return a;
}

nlohmann::json read_sidecar(const std::string& stem) {
    std::ifstream in(stem + ".json");
    if (!in) throw IoError("cannot open " + stem + ".json");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(stem + ".json: " + e.what());
    }
}

void write_sidecar(const std::string& stem, const nlohmann::json& j) {
    std::ofstream out(stem + ".json");
    if (!out) throw IoError("cannot write " + stem + ".json");
    out << j.dump(2) << "\n";
}

}  // namespace

std::size_t CompletionInstance::observed_count() const {
    std::size_t c = 0;
    for (double v : mask.values()) c += v != 0.0;
    return c;
}

CompletionInstance gen_completion(const Dims& dims, std::size_t r, double rho, std::uint64_t seed,
                                  double tau_fraction) {
    validate_dims(dims);
    for (std::size_t n : dims)
        if (r > n) throw RankOutOfRange("gen_completion needs r <= every dimension");
    if (!(rho > 0.0 && rho <= 1.0)) throw ShapeMismatch("observation probability must lie in (0, 1]");
    Rng data(seed, 0), coin(seed, 1);
    CompletionInstance inst;
    inst.dims = dims;
    inst.rho = rho;
    inst.rank = r;
    inst.seed = seed;
    DenseTensor m = gaussian(Dims(dims.size(), r), data, 1.0);
    for (std::size_t j = 0; j < dims.size(); ++j) m = mode_product(m, gaussian_matrix(dims[j], r, data), j);
    inst.truth = std::move(m);
    inst.mask = DenseTensor(dims);
    for (std::size_t i = 0; i < inst.mask.size(); ++i) inst.mask[i] = coin.bernoulli(rho) ? 1.0 : 0.0;
    inst.observed = hadamard(inst.mask, inst.truth);
    inst.truth_tnn = tnn(inst.truth);
    inst.tau = tau_fraction * inst.truth_tnn;
    return inst;
}

SmoothObjective completion_objective(const CompletionInstance& inst) {
    auto mask = std::make_shared<const DenseTensor>(inst.mask);
    auto obs = std::make_shared<const DenseTensor>(inst.observed);
    SmoothObjective f;
    f.grad = [mask, obs](const DenseTensor& x) {
        require_same_shape(x, *mask, "completion gradient");
        DenseTensor g = hadamard(*mask, x);
        g -= *obs;
        return g;
    };
    f.eval = [mask, obs](const DenseTensor& x) {
        require_same_shape(x, *mask, "completion objective");
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double d = (*mask)[i] * x[i] - (*obs)[i];
            s += d * d;
        }
        return 0.5 * s;
    };
    f.beta = 1.0;
    return f;
}

DenseTensor completion_init(const CompletionInstance& inst, std::size_t r, const TruncatedSvdOptions& opts) {
    return truncated_project_tnn(inst.observed, inst.tau, r, opts).projected;
}

RpcaInstance gen_rpca(std::size_t n, std::size_t r, double m, std::uint64_t seed, double tau_fraction,
                      std::optional<double> factor_sd) {
    if (n == 0) throw ShapeMismatch("gen_rpca needs n > 0");
    if (r > n) throw RankOutOfRange("gen_rpca needs r <= n");
    if (!(m >= 0.0 && m <= 1.0)) throw ShapeMismatch("noise density must lie in [0, 1]");
    if (factor_sd && !(*factor_sd > 0.0)) throw ShapeMismatch("factor standard deviation must be positive");
    Rng data(seed, 0), noise_rng(seed, 1);
    RpcaInstance inst;
    inst.dims = {n, n, n};
    inst.m = m;
    inst.rank = r;
    inst.seed = seed;
    double sd = factor_sd ? *factor_sd : 1.0 / std::sqrt(double(n));
    inst.factor_sd = sd;
    DenseTensor p = gaussian({n, r, n}, data, sd);
    DenseTensor q = gaussian({n, r, n}, data, sd);
    inst.truth = t_product(p, t_transpose(q));
    inst.noise = DenseTensor(inst.dims);
    for (std::size_t i = 0; i < inst.noise.size(); ++i) {
        bool hit = noise_rng.bernoulli(m);
        double sign = noise_rng.rademacher();
        if (hit) inst.noise[i] = sign;
    }
    inst.corrupted = inst.truth + inst.noise;
    inst.truth_tnn = tnn(inst.truth);
    inst.tau = tau_fraction * inst.truth_tnn;
    return inst;
}

SaddleObjective rpca_saddle(const RpcaInstance& inst) {
    auto mt = std::make_shared<const DenseTensor>(inst.corrupted);
    SaddleObjective s;
    s.value = [mt](const DenseTensor& x, const DualPoint& y) { return inner(x - *mt, y); };
    s.grad_x = [](const DenseTensor&, const DualPoint& y) { return y; };
    s.grad_y = [mt](const DenseTensor& x, const DualPoint&) { return x - *mt; };
    s.project_dual = [](const DualPoint& y) { return project_linf(y, 1.0); };
    s.support = [](const DualPoint& g) {
        double t = 0.0;
        for (double v : g.values()) t += std::abs(v);
        return t;
    };
    s.primal = [mt](const DenseTensor& x) {
        double t = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) t += std::abs(x[i] - (*mt)[i]);
        return t;
    };
    s.beta_x = 0.0;
    s.beta_y = 0.0;
    s.beta_xy = 1.0;
    s.beta_yx = 1.0;
    return s;
}

RpcaStart rpca_init(const RpcaInstance& inst, std::size_t r, const TruncatedSvdOptions& opts) {
    RpcaStart out;
    out.x = truncated_project_tnn(inst.corrupted, inst.tau, r, opts).projected;
    out.y = out.x - inst.corrupted;
    for (double& v : out.y.values()) v = double((v > 0.0) - (v < 0.0));
    return out;
}

double recovery_error(const DenseTensor& x, const DenseTensor& truth, double truth_tnn, double tau) {
    require_same_shape(x, truth, "recovery_error");
    double denom = fro_norm(truth);
    if (denom == 0.0 || tau <= 0.0) throw ShapeMismatch("recovery_error needs nonzero truth and radius");
    DenseTensor d = (truth_tnn / tau) * x;
    d -= truth;
    double e = fro_norm(d) / denom;
    return e * e;
}

double recovery_error(const DenseTensor& x, const CompletionInstance& inst) {
    return recovery_error(x, inst.truth, inst.truth_tnn, inst.tau);
}

double recovery_error(const DenseTensor& x, const RpcaInstance& inst) {
    return recovery_error(x, inst.truth, inst.truth_tnn, inst.tau);
}

void save_instance(const std::string& stem, const CompletionInstance& inst) {
    write_tensor(stem + ".truth.tten", inst.truth);
    write_tensor(stem + ".mask.tten", inst.mask);
    write_sidecar(stem, {{"kind", "completion"},
                         {"dims", inst.dims},
                         {"seed", inst.seed},
                         {"rho", inst.rho},
                         {"r", inst.rank},
                         {"tau", inst.tau},
                         {"truth_tnn", inst.truth_tnn}});
}

void save_instance(const std::string& stem, const RpcaInstance& inst) {
    write_tensor(stem + ".truth.tten", inst.truth);
    write_tensor(stem + ".noise.tten", inst.noise);
    write_sidecar(stem, {{"kind", "rpca"},
                         {"dims", inst.dims},
                         {"seed", inst.seed},
                         {"m", inst.m},
                         {"factor_sd", inst.factor_sd},
                         {"r", inst.rank},
                         {"tau", inst.tau},
                         {"truth_tnn", inst.truth_tnn}});
}

CompletionInstance load_completion(const std::string& stem) {
    auto j = read_sidecar(stem);
    if (j.value("kind", "") != "completion") throw IoError(stem + ".json is not a completion instance");
    CompletionInstance inst;
    try {
        inst.dims = j.at("dims").get<Dims>();
        inst.seed = j.at("seed").get<std::uint64_t>();
        inst.rho = j.at("rho").get<double>();
        inst.rank = j.at("r").get<std::size_t>();
        inst.tau = j.at("tau").get<double>();
        inst.truth_tnn = j.at("truth_tnn").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError(stem + ".json: " + e.what());
    }
    inst.truth = read_tensor(stem + ".truth.tten");
    inst.mask = read_tensor(stem + ".mask.tten");
    if (inst.truth.dims() != inst.dims || inst.mask.dims() != inst.dims)
        throw IoError(stem + ": tensor shapes disagree with sidecar");
    inst.observed = hadamard(inst.mask, inst.truth);
    return inst;
}

RpcaInstance load_rpca(const std::string& stem) {
    auto j = read_sidecar(stem);
    if (j.value("kind", "") != "rpca") throw IoError(stem + ".json is not an rpca instance");
    RpcaInstance inst;
    try {
        inst.dims = j.at("dims").get<Dims>();
        inst.seed = j.at("seed").get<std::uint64_t>();
        inst.m = j.at("m").get<double>();
        inst.factor_sd = j.value("factor_sd", 0.0);
        inst.rank = j.at("r").get<std::size_t>();
        inst.tau = j.at("tau").get<double>();
        inst.truth_tnn = j.at("truth_tnn").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError(stem + ".json: " + e.what());
    }
    inst.truth = read_tensor(stem + ".truth.tten");
    inst.noise = read_tensor(stem + ".noise.tten");
    if (inst.truth.dims() != inst.dims || inst.noise.dims() != inst.dims)
        throw IoError(stem + ": tensor shapes disagree with sidecar");
    inst.corrupted = inst.truth + inst.noise;
    return inst;
}

}  // namespace tubalkit
