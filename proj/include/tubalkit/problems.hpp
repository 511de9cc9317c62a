#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "tubalkit/objectives.hpp"
#include "tubalkit/slice_svd.hpp"
#include "tubalkit/tensor.hpp"

namespace tubalkit {

struct CompletionInstance {
    Dims dims;
    // 1 on observed entries, 0 elsewhere.
    DenseTensor mask;
    // mask * truth
    DenseTensor observed;
    DenseTensor truth;
    double truth_tnn = 0.0;
    double rho = 1.0;
    std::size_t rank = 0;
    double tau = 0.0;
    std::uint64_t seed = 0;

    std::size_t observed_count() const;
};

struct RpcaInstance {
    Dims dims;
    DenseTensor corrupted;
    DenseTensor truth;
    DenseTensor noise;
    double truth_tnn = 0.0;
    double m = 0.0;
    std::size_t rank = 0;
    double tau = 0.0;
    std::uint64_t seed = 0;
    double factor_sd = 0.0;
};

inline constexpr double kCompletionTauFraction = 0.7;
inline constexpr double kRpcaTauFraction = 0.75;

// Tucker model G x1 A1 ... xd Ad with N(0,1) core and factors; entries observed with probability rho.
CompletionInstance gen_completion(const Dims& dims, std::size_t r, double rho, std::uint64_t seed,
                                  double tau_fraction = kCompletionTauFraction);
SmoothObjective completion_objective(const CompletionInstance& inst);
DenseTensor completion_init(const CompletionInstance& inst, std::size_t r,
                            const TruncatedSvdOptions& opts = TruncatedSvdOptions{});

// M = P * Q^T with P, Q of size n x r x n, entries N(0, 1/n); noise entries
// are +-1 with probability m each position. factor_sd overrides the entry
// standard deviation 1/sqrt(n) of P and Q.
RpcaInstance gen_rpca(std::size_t n, std::size_t r, double m, std::uint64_t seed,
                      double tau_fraction = kRpcaTauFraction, std::optional<double> factor_sd = std::nullopt);
SaddleObjective rpca_saddle(const RpcaInstance& inst);

struct RpcaStart {
    DenseTensor x;
    DualPoint y;
};
RpcaStart rpca_init(const RpcaInstance& inst, std::size_t r, const TruncatedSvdOptions& opts = TruncatedSvdOptions{});

// ||(tnn(M)/tau) x - M||_F^2 / ||M||_F^2
double recovery_error(const DenseTensor& x, const DenseTensor& truth, double truth_tnn, double tau);
double recovery_error(const DenseTensor& x, const CompletionInstance& inst);
double recovery_error(const DenseTensor& x, const RpcaInstance& inst);

// Binary tensors <stem>.truth.tten, <stem>.mask.tten / <stem>.noise.tten plus a JSON sidecar <stem>.json.
void save_instance(const std::string& stem, const CompletionInstance& inst);
void save_instance(const std::string& stem, const RpcaInstance& inst);
CompletionInstance load_completion(const std::string& stem);
RpcaInstance load_rpca(const std::string& stem);

}  // namespace tubalkit
