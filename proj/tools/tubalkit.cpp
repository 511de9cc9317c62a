// tubalkit command line driver: experiment campaigns and tensor utilities.

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tubalkit/errors.hpp"
#include "tubalkit/experiment.hpp"
#include "tubalkit/io.hpp"
#include "tubalkit/projection.hpp"
#include "tubalkit/slice_svd.hpp"
#include "tubalkit/tsvd.hpp"

using namespace tubalkit;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

// Restart under the Haswell kernels of OpenBLAS unless the user chose a core type.
void pin_blas_kernels(char** argv) {
#if defined(__x86_64__)
    if (std::getenv(kBlasCoreEnv) != nullptr || !__builtin_cpu_supports("avx2")) return;
    setenv(kBlasCoreEnv, "Haswell", 1);
    execv("/proc/self/exe", argv);
#else
    (void)argv;
#endif
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string dims_string(const Dims& d) {
    std::string s;
    for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "x" : "") + std::to_string(d[i]);
    return s;
}

int cmd_run(const std::string& config_path, const std::map<std::string, std::string>& flags,
            const std::vector<std::string>& order) {
    std::vector<Setting> settings;
    if (!config_path.empty()) settings = read_config_file(config_path);
    for (const auto& key : order) settings.push_back({key, flags.at(key), "--" + key});
    ExperimentConfig cfg = build_config(settings);

    std::cout << "problem " << to_string(cfg.problem) << ", dims " << dims_string(cfg.dims) << ", r " << cfg.r
              << ", solver " << to_string(cfg.solver) << ", T " << cfg.iterations << ", projection "
              << to_string(cfg.projection) << "(" << cfg.proj_rank << "), " << cfg.seeds.size() << " seeds\n";
    ExperimentSummary s = run_experiment(cfg);
    std::printf("%-6s %12s %12s %12s %12s %8s %10s %6s\n", "seed", "init_err", "rec_err", "dual_gap", "sc",
                "first", "seconds", "esc");
    for (const auto& r : s.runs) {
        std::string first = r.first_certified_iteration ? std::to_string(*r.first_certified_iteration) : "-";
        std::printf("%-6llu %12.5g %12.5g %12.5g %12.5g %8s %10.3f %6zu\n", (unsigned long long)r.seed,
                    r.init_error, r.recovery_error, r.dual_gap, r.sc_measure, first.c_str(), r.wall_time,
                    r.escalations);
    }
    std::printf("%-6s %12.5g %12.5g %12.5g %12.5g %8.3g %10.3f %6.3g\n", "mean", s.init_error, s.recovery_error,
                s.dual_gap, s.sc_measure, s.first_certified_iteration, s.wall_time, s.escalations);
    if (!cfg.output.empty()) std::cout << "wrote " << cfg.output << "/runs.csv\n";
    return 0;
}

int cmd_tsvd(const std::string& file, std::optional<std::size_t> rank, const std::string& out) {
    DenseTensor x = read_tensor(file);
    TsvdFactors f = rank ? rank_r_tsvd(x, *rank) : tsvd(x);
    SliceSpectrum spec = slice_spectrum(x);
    AverageRank avg = average_rank(x);
    double norm = fro_norm(x);
    double err = fro_norm(f.reconstruct() - x) / (norm > 0.0 ? norm : 1.0);

    std::cout << "dims = " << dims_string(x.dims()) << "\n"
              << "tubal_rank = " << tubal_rank(x) << "\n"
              << "average_rank = " << fmt(avg.value()) << "\n"
              << "tnn = " << fmt(tnn(x)) << "\n"
              << "spectral_norm = " << fmt(spectral_norm(x)) << "\n";
    for (std::size_t k = 0; k < spec.num_slices(); ++k) {
        const auto& v = spec.values[k];
        std::cout << "slice " << k << ":";
        for (Eigen::Index i = 0; i < std::min<Eigen::Index>(v.size(), 6); ++i) std::cout << " " << fmt(v[i]);
        if (v.size() > 6) std::cout << " ...";
        std::cout << "\n";
    }
    std::cout << "reconstruction_error = " << fmt(err) << (rank ? " (rank " + std::to_string(*rank) + ")" : "")
              << "\n";
    if (!out.empty()) {
        write_tensor(out + ".u.tten", f.u);
        write_tensor(out + ".s.tten", f.s);
        write_tensor(out + ".v.tten", f.v);
        std::cout << "wrote " << out << ".{u,s,v}.tten\n";
    }
    return 0;
}

int cmd_project(const std::string& file, double tau, std::optional<std::size_t> rank, std::string out) {
    DenseTensor x = read_tensor(file);
    ProjectionResult p = rank ? truncated_project_tnn(x, tau, *rank) : project_tnn(x, tau);
    if (out.empty()) out = file + ".proj.tten";
    write_tensor(out, p.projected);
    std::cout << "sigma = " << fmt(p.threshold) << "\n"
              << "rank = " << p.rank() << "\n"
              << "tnn = " << fmt(tnn(p.projected)) << "\n";
    if (rank) std::cout << "certified = " << (p.certificate_rank ? "true" : "false") << "\n";
    std::cout << "wrote " << out << "\n";
    return 0;
}

int cmd_certify(const std::string& file, double tau, std::size_t rank) {
    DenseTensor x = read_tensor(file);
    CertificateResult c = certificate_check(slice_spectrum(x), tau, rank);
    std::cout << "value = " << fmt(c.value) << "\n"
              << "sigma_next_max = " << fmt(c.sigma_next_max) << "\n"
              << "verdict = " << (c.holds ? "true" : "false") << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    pin_blas_kernels(argv);

    CLI::App app{"Low-tubal-rank tensor recovery over the TNN ball"};
    app.name("tubalkit");
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a completion or robust PCA campaign over seeds");
    std::string config_path;
    run->add_option("-c,--config", config_path, "key = value config file");
    std::map<std::string, std::string> flags;
    for (const auto& key : config_keys()) run->add_option("--" + key, flags[key], "override config key " + key);

    auto* tsvd_cmd = app.add_subcommand("tsvd", "t-SVD summary of a tensor file");
    std::string tsvd_file, tsvd_out;
    std::optional<std::size_t> tsvd_rank;
    tsvd_cmd->add_option("file", tsvd_file, "tensor file")->required();
    tsvd_cmd->add_option("-r,--rank", tsvd_rank, "rank-r t-SVD");
    tsvd_cmd->add_option("-o,--out", tsvd_out, "write factors to <out>.{u,s,v}.tten");

    auto* proj_cmd = app.add_subcommand("project", "Project a tensor onto the TNN ball");
    std::string proj_file, proj_out;
    double proj_tau = 0.0;
    std::optional<std::size_t> proj_rank;
    proj_cmd->add_option("file", proj_file, "tensor file")->required();
    proj_cmd->add_option("-t,--tau", proj_tau, "ball radius")->required();
    proj_cmd->add_option("-r,--rank", proj_rank, "use the rank-r truncated projection");
    proj_cmd->add_option("-o,--out", proj_out, "output tensor (default <file>.proj.tten)");

    auto* cert_cmd = app.add_subcommand("certify", "Check the low-rank projection certificate");
    std::string cert_file;
    double cert_tau = 0.0;
    std::size_t cert_rank = 1;
    cert_cmd->add_option("file", cert_file, "tensor file")->required();
    cert_cmd->add_option("-t,--tau", cert_tau, "ball radius")->required();
    cert_cmd->add_option("-r,--rank", cert_rank, "rank")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::Error& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*run) {
            std::vector<std::string> order;
            for (const auto& key : config_keys())
                if (run->count("--" + key) > 0) order.push_back(key);
            if (std::find(order.begin(), order.end(), "problem") != order.end()) {
                order.erase(std::find(order.begin(), order.end(), "problem"));
                order.insert(order.begin(), "problem");
            }
            return cmd_run(config_path, flags, order);
        }
        if (*tsvd_cmd) return cmd_tsvd(tsvd_file, tsvd_rank, tsvd_out);
        if (*proj_cmd) return cmd_project(proj_file, proj_tau, proj_rank, proj_out);
        if (*cert_cmd) return cmd_certify(cert_file, cert_tau, cert_rank);
    } catch (const NumericalError& e) {
        std::cerr << "tubalkit: numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "tubalkit: " << e.what() << "\n";
        return kExitConfig;
    }
    return 0;
}
