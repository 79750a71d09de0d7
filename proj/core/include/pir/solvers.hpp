#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pir/grid.hpp"
#include "pir/operators.hpp"

namespace pir {

// Generalized Gaussian prior, p fixed to 1 (Laplacian): gamma = 1/beta.
struct PriorConfig {
    double p = 1.0;
    double gamma = 0.0;
    double beta = 0.0;
    bool background_penalized = false;  // background scalar exempt from l1/threshold by default

    static PriorConfig from_gamma(double gamma);
    static PriorConfig from_beta(double beta);
    void validate() const;  // p == 1, gamma*beta == 1
};

struct MuSearchConfig {
    double alpha = 0.8;       // geometric factor in (0,1)
    double nu_init = 1.0;     // preset nu
    int max_doublings = 400;  // safeguard on either branch
};

struct StopRule {
    double rel_tol = 1e-6;  // 0 disables, runs to max_iter
    int max_iter = 500;
};

struct TraceRow {
    int t = 0;
    double objective = 0.0;
    double mu = 0.0;        // 0 on the initial row
    double rel_change = 0.0;
    double nmse = 0.0;
    bool has_mu = false;
    bool has_nmse = false;
};

struct SolveTrace {
    std::vector<TraceRow> rows;
    std::string termination;  // "rel_tol" | "max_iter" | "error"
    long long floor_activations = 0;
    std::vector<std::string> warnings;
};

// Raised when an iterate leaves dom E; carries the trace accumulated so far.
class SolverDomainError : public std::runtime_error {
public:
    SolverDomainError(const std::string& msg, SolveTrace trace_so_far)
        : std::runtime_error(msg), trace(std::move(trace_so_far)) {}
    SolveTrace trace;
};

// E(c) = <1, A[c]> - <g, log A[c]> + gamma*||c||_1. Errors where A[c] <= 0
// with g > 0 there; elsewhere the log argument is floored at 1e-12.
double objective(const CoeffField& c, const CountGrid& g, const LinearOp& A, const PriorConfig& prior);

CoeffField soft_threshold(const CoeffField& c, double gamma, double mu, bool exempt_background = false);

// c_t + (1/mu) A*[(g - A[c_t]) / A[c_t]]; requires A[c_t] > 0 elementwise.
CoeffField pis_gradient_arg(const CoeffField& c_t, const CountGrid& g, const LinearOp& A, double mu);

// F(c_next, c_t) = <A*[g/A[c_t]], c_next - c_t> - <g, log(A[c_next]/A[c_t])>.
double surrogate_gap(const CoeffField& c_next, const CoeffField& c_t, const CountGrid& g, const LinearOp& A);

// Geometric search for the scaling parameter: shrink nu by alpha while the
// test mu*||dc||^2 >= 2F holds (return the last passing pair), else grow by
// 1/alpha until it first holds. A candidate whose A-image is not strictly
// positive counts as a failed test.
std::pair<double, CoeffField> find_mu(const CoeffField& c_t, const CountGrid& g, const LinearOp& A,
                                      const PriorConfig& prior, const MuSearchConfig& cfg);

using ReconstructFn = std::function<ImageGrid(const CoeffField&)>;

struct PisOptions {
    PriorConfig prior;
    MuSearchConfig mu_cfg;
    std::optional<double> fixed_mu;  // bypasses the search when set
    StopRule stop;
};

// Iterative shrinkage for the Poisson model. The stopping rule measures the
// relative Frobenius change of recon(c_t) when a reconstruction callback is
// given (typically Phi[c] plus background level), else of the coefficients.
// Trace NMSE uses eval_recon when given (e.g. Phi[c] alone), else recon.
std::pair<CoeffField, SolveTrace> pis_solve(const CountGrid& g, const LinearOp& A, const PisOptions& opt,
                                            const CoeffField& c0, const ReconstructFn& recon = nullptr,
                                            const ImageGrid* truth = nullptr,
                                            const ReconstructFn& eval_recon = nullptr);

// Phi*[max(g - median(g), small)] with the background slot set so the
// represented level equals median(g).
CoeffField pis_default_init(const CountGrid& g, const LinearOp& Phi, double background_atom_scale);

struct GisOptions {
    double gamma = 0.0;
    double mu = 0.0;
    StopRule stop;
    bool exempt_background = true;
};

// Gaussian-model iterative shrinkage c_{t+1} = S(c_t + (1/mu) A*[g - A c_t]).
// mu at or below ||A*A|| is recorded as a trace warning, not fatal.
std::pair<CoeffField, SolveTrace> gis_solve(const ImageGrid& g, const LinearOp& A, const GisOptions& opt,
                                            const ReconstructFn& recon = nullptr,
                                            const ImageGrid* truth = nullptr,
                                            const ReconstructFn& eval_recon = nullptr);

struct RlResult {
    ImageGrid final;
    SolveTrace trace;
    // filled when truth is supplied: iterate with the smallest NMSE
    std::optional<ImageGrid> best;
    int best_iter = -1;
    double best_nmse = 0.0;
};

RlResult rl_solve(const CountGrid& g, const Kernel& H, const ImageGrid& f0, int max_iter,
                  const ImageGrid* truth = nullptr);

RlResult rltv_solve(const CountGrid& g, const Kernel& H, const ImageGrid& f0, double gamma_tv, int max_iter,
                    const ImageGrid* truth = nullptr);

// div(grad f / ||grad f||): forward-difference gradient, norm regularized by
// eps, backward-difference divergence, periodic boundaries.
ImageGrid curvature(const ImageGrid& f, double eps);

}  // namespace pir
