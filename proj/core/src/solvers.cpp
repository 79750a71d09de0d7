#include "pir/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fft_internal.hpp"
#include "pir/metrics.hpp"

namespace pir {

namespace {

constexpr double kLogFloor = 1e-12;

double band_l1(const CoeffField& c, bool include_background) {
    KahanSum s;
    for (const auto& b : c.bands)
        for (double x : b.img.v) s.add(std::fabs(x));
    if (include_background && c.background) s.add(std::fabs(*c.background));
    return s.value();
}

// Poisson data term <1, lam> - <g, log lam> with the log argument floored;
// errors only where the floor would mask a true domain violation (g > 0).
double data_term(const ImageGrid& lam, const CountGrid& g, long long* floor_activations) {
    if (!(lam.h == g.h && lam.w == g.w)) throw std::invalid_argument("objective: dimension mismatch");
    KahanSum s;
    for (int i = 0; i < lam.n(); ++i) {
        double l = lam.v[i];
        if (l <= 0.0 && g.v[i] > 0) throw std::invalid_argument("objective: A[c] <= 0 where g > 0");
        s.add(l);
        if (g.v[i] > 0) {
            double le = l;
            if (le < kLogFloor) {
                le = kLogFloor;
                if (floor_activations) ++*floor_activations;
            }
            s.add(-static_cast<double>(g.v[i]) * std::log(le));
        }
    }
    return s.value();
}

double objective_at(const CoeffField& c, const ImageGrid& lam, const CountGrid& g, const PriorConfig& prior,
                    long long* floor_activations) {
    return data_term(lam, g, floor_activations) + prior.gamma * band_l1(c, prior.background_penalized);
}

bool strictly_positive(const ImageGrid& lam) {
    for (double x : lam.v)
        if (!(x > 0.0)) return false;
    return true;
}

double soft_scalar(double x, double thr) {
    if (x > thr) return x - thr;
    if (x < -thr) return x + thr;
    return 0.0;
}

double safe_rel_change(const ImageGrid& prev, const ImageGrid& next) {
    double np = norm(prev);
    if (np == 0.0) return norm(next) == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    KahanSum s;
    for (int i = 0; i < prev.n(); ++i) {
        double d = next.v[i] - prev.v[i];
        s.add(d * d);
    }
    return std::sqrt(s.value()) / np;
}

double coeff_rel_change(const CoeffField& prev, const CoeffField& next) {
    double np = std::sqrt(coeff_norm_sq(prev));
    CoeffField d = coeff_axpy(next, prev, -1.0);
    double nd = std::sqrt(coeff_norm_sq(d));
    if (np == 0.0) return nd == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return nd / np;
}

struct Candidate {
    CoeffField c;
    ImageGrid lam;
    double norm_sq_delta = 0.0;
    double gap = 0.0;
    bool feasible = false;
    bool pass = false;
};

// Shared per-iteration state for the mu-search: the step field
// s = A*[(g - lam)/lam] and u = A*[g/lam] are fixed while nu varies.
struct MuSearchState {
    const CoeffField& c_t;
    const CountGrid& g;
    const LinearOp& A;
    const PriorConfig& prior;
    CoeffField s;
    CoeffField u;
    const ImageGrid& lam_t;

    Candidate eval(double nu) const {
        Candidate cand;
        double inv = 1.0 / nu;
        double thr = prior.gamma / nu;
        cand.c = c_t;
        KahanSum n2;
        KahanSum dot_u;  // <u, c_next - c_t>
        for (size_t k = 0; k < cand.c.bands.size(); ++k) {
            auto& x = cand.c.bands[k].img;
            const auto& sv = s.bands[k].img;
            const auto& uv = u.bands[k].img;
            const auto& cv = c_t.bands[k].img;
            for (int i = 0; i < x.n(); ++i) {
                double next = soft_scalar(cv.v[i] + inv * sv.v[i], thr);
                double d = next - cv.v[i];
                x.v[i] = next;
                n2.add(d * d);
                dot_u.add(uv.v[i] * d);
            }
        }
        if (cand.c.background) {
            double bg = *c_t.background + inv * *s.background;
            if (prior.background_penalized) bg = soft_scalar(bg, thr);
            double d = bg - *c_t.background;
            *cand.c.background = bg;
            n2.add(d * d);
            dot_u.add(*u.background * d);
        }
        cand.norm_sq_delta = n2.value();
        cand.lam = A.apply(cand.c);
        cand.feasible = strictly_positive(cand.lam);
        if (cand.feasible) {
            KahanSum logs;
            for (int i = 0; i < cand.lam.n(); ++i)
                if (g.v[i] > 0)
                    logs.add(static_cast<double>(g.v[i]) * std::log(cand.lam.v[i] / lam_t.v[i]));
            cand.gap = dot_u.value() - logs.value();
            cand.pass = nu * cand.norm_sq_delta >= 2.0 * cand.gap;
        }
        return cand;
    }
};

MuSearchState make_state(const CoeffField& c_t, const CountGrid& g, const LinearOp& A, const PriorConfig& prior,
                         const ImageGrid& lam_t) {
    ImageGrid resid(lam_t.h, lam_t.w);
    ImageGrid ratio(lam_t.h, lam_t.w);
    for (int i = 0; i < lam_t.n(); ++i) {
        double gv = static_cast<double>(g.v[i]);
        resid.v[i] = (gv - lam_t.v[i]) / lam_t.v[i];
        ratio.v[i] = gv / lam_t.v[i];
    }
    return MuSearchState{c_t, g, A, prior, A.adjoint(resid), A.adjoint(ratio), lam_t};
}

std::tuple<double, Candidate> find_mu_impl(const MuSearchState& st, const MuSearchConfig& cfg) {
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw std::invalid_argument("find_mu: alpha must be in (0,1)");
    if (!(cfg.nu_init > 0.0)) throw std::invalid_argument("find_mu: nu_init must be positive");
    double nu = cfg.nu_init;
    Candidate cand = st.eval(nu);
    if (cand.pass) {
        // shrink while the test holds, return the last passing pair
        for (int steps = 0; steps < cfg.max_doublings; ++steps) {
            double nu2 = cfg.alpha * nu;
            Candidate c2 = st.eval(nu2);
            if (!c2.pass) return {nu, std::move(cand)};
            nu = nu2;
            cand = std::move(c2);
        }
        return {nu, std::move(cand)};  // safeguard cap; pair still satisfies the test
    }
    for (int steps = 0; steps < cfg.max_doublings; ++steps) {
        nu /= cfg.alpha;
        cand = st.eval(nu);
        if (cand.pass) return {nu, std::move(cand)};
    }
    throw SolverDomainError("find_mu: max_doublings exceeded without a passing candidate", SolveTrace{});
}

}  // namespace

PriorConfig PriorConfig::from_gamma(double gamma) {
    PriorConfig p;
    p.gamma = gamma;
    p.beta = 1.0 / gamma;
    p.validate();
    return p;
}

PriorConfig PriorConfig::from_beta(double beta) {
    PriorConfig p;
    p.beta = beta;
    p.gamma = 1.0 / beta;
    p.validate();
    return p;
}

void PriorConfig::validate() const {
    if (p != 1.0) throw std::invalid_argument("PriorConfig: p is fixed to 1");
    if (!(gamma > 0.0) || !(beta > 0.0)) throw std::invalid_argument("PriorConfig: gamma and beta must be positive");
    if (std::fabs(gamma * beta - 1.0) > 1e-9)
        throw std::invalid_argument("PriorConfig: gamma must equal 1/beta for p = 1");
}

double objective(const CoeffField& c, const CountGrid& g, const LinearOp& A, const PriorConfig& prior) {
    return objective_at(c, A.apply(c), g, prior, nullptr);
}

CoeffField soft_threshold(const CoeffField& c, double gamma, double mu, bool exempt_background) {
    if (!(mu > 0.0)) throw std::invalid_argument("soft_threshold: mu must be positive");
    double thr = gamma / mu;
    CoeffField out = c;
    for (auto& b : out.bands)
        for (double& x : b.img.v) x = soft_scalar(x, thr);
    if (out.background && !exempt_background) *out.background = soft_scalar(*out.background, thr);
    return out;
}

CoeffField pis_gradient_arg(const CoeffField& c_t, const CountGrid& g, const LinearOp& A, double mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("pis_gradient_arg: mu must be positive");
    ImageGrid lam = A.apply(c_t);
    ImageGrid resid(lam.h, lam.w);
    for (int i = 0; i < lam.n(); ++i) {
        if (!(lam.v[i] > 0.0)) throw std::invalid_argument("pis_gradient_arg: division by nonpositive A[c_t]");
        resid.v[i] = (static_cast<double>(g.v[i]) - lam.v[i]) / lam.v[i];
    }
    return coeff_axpy(c_t, A.adjoint(resid), 1.0 / mu);
}

double surrogate_gap(const CoeffField& c_next, const CoeffField& c_t, const CountGrid& g, const LinearOp& A) {
    ImageGrid lam_t = A.apply(c_t);
    ImageGrid lam_n = A.apply(c_next);
    if (!strictly_positive(lam_t) || !strictly_positive(lam_n))
        throw std::invalid_argument("surrogate_gap: operands outside dom E");
    ImageGrid ratio(lam_t.h, lam_t.w);
    for (int i = 0; i < lam_t.n(); ++i) ratio.v[i] = static_cast<double>(g.v[i]) / lam_t.v[i];
    CoeffField u = A.adjoint(ratio);
    CoeffField delta = coeff_axpy(c_next, c_t, -1.0);
    double term1 = coeff_inner_product(u, delta);
    KahanSum logs;
    for (int i = 0; i < lam_t.n(); ++i)
        if (g.v[i] > 0) logs.add(static_cast<double>(g.v[i]) * std::log(lam_n.v[i] / lam_t.v[i]));
    return term1 - logs.value();
}

std::pair<double, CoeffField> find_mu(const CoeffField& c_t, const CountGrid& g, const LinearOp& A,
                                      const PriorConfig& prior, const MuSearchConfig& cfg) {
    prior.validate();
    ImageGrid lam_t = A.apply(c_t);
    if (!strictly_positive(lam_t)) throw std::invalid_argument("find_mu: c_t outside dom E");
    MuSearchState st = make_state(c_t, g, A, prior, lam_t);
    auto [mu, cand] = find_mu_impl(st, cfg);
    return {mu, std::move(cand.c)};
}

std::pair<CoeffField, SolveTrace> pis_solve(const CountGrid& g, const LinearOp& A, const PisOptions& opt,
                                            const CoeffField& c0, const ReconstructFn& recon,
                                            const ImageGrid* truth, const ReconstructFn& eval_recon) {
    opt.prior.validate();
    SolveTrace trace;
    CoeffField c = c0;
    ImageGrid lam = A.apply(c);
    if (!strictly_positive(lam)) throw SolverDomainError("pis_solve: c0 outside dom E", std::move(trace));

    const ReconstructFn& for_nmse = eval_recon ? eval_recon : recon;
    auto eval_nmse = [&](const CoeffField& cc) -> std::pair<bool, double> {
        if (!truth || !for_nmse) return {false, 0.0};
        return {true, nmse(*truth, for_nmse(cc))};
    };

    double E = objective_at(c, lam, g, opt.prior, &trace.floor_activations);
    {
        TraceRow r0;
        r0.t = 0;
        r0.objective = E;
        auto [has, v] = eval_nmse(c);
        r0.has_nmse = has;
        r0.nmse = v;
        trace.rows.push_back(r0);
    }

    ImageGrid f_prev;
    CoeffField c_prev_for_rel;
    if (recon) f_prev = recon(c);

    for (int t = 1; t <= opt.stop.max_iter; ++t) {
        double mu_t = 0.0;
        CoeffField c_next;
        ImageGrid lam_next;
        if (opt.fixed_mu) {
            mu_t = *opt.fixed_mu;
            MuSearchState st = make_state(c, g, A, opt.prior, lam);
            Candidate cand = st.eval(mu_t);
            c_next = std::move(cand.c);
            lam_next = std::move(cand.lam);
            if (!cand.feasible) {
                trace.termination = "error";
                throw SolverDomainError("pis_solve: iterate left dom E (fixed mu too small?)", std::move(trace));
            }
        } else {
            MuSearchState st = make_state(c, g, A, opt.prior, lam);
            try {
                auto [mu, cand] = find_mu_impl(st, opt.mu_cfg);
                mu_t = mu;
                c_next = std::move(cand.c);
                lam_next = std::move(cand.lam);
            } catch (SolverDomainError& e) {
                trace.termination = "error";
                e.trace = std::move(trace);
                throw;
            }
        }

        E = objective_at(c_next, lam_next, g, opt.prior, &trace.floor_activations);

        TraceRow row;
        row.t = t;
        row.objective = E;
        row.mu = mu_t;
        row.has_mu = true;
        if (recon) {
            ImageGrid f_now = recon(c_next);
            row.rel_change = safe_rel_change(f_prev, f_now);
            f_prev = std::move(f_now);
        } else {
            row.rel_change = coeff_rel_change(c, c_next);
        }
        auto [has, v] = eval_nmse(c_next);
        row.has_nmse = has;
        row.nmse = v;
        trace.rows.push_back(row);

        c = std::move(c_next);
        lam = std::move(lam_next);

        if (opt.stop.rel_tol > 0.0 && row.rel_change < opt.stop.rel_tol) {
            trace.termination = "rel_tol";
            return {std::move(c), std::move(trace)};
        }
    }
    trace.termination = "max_iter";
    return {std::move(c), std::move(trace)};
}

CoeffField pis_default_init(const CountGrid& g, const LinearOp& Phi, double background_atom_scale) {
    if (!(background_atom_scale > 0.0))
        throw std::invalid_argument("pis_default_init: atom scale must be positive");
    std::vector<std::int64_t> sorted(g.v);
    std::sort(sorted.begin(), sorted.end());
    size_t n = sorted.size();
    double med = n % 2 == 1 ? static_cast<double>(sorted[n / 2])
                            : 0.5 * (static_cast<double>(sorted[n / 2 - 1]) + static_cast<double>(sorted[n / 2]));
    ImageGrid x(g.h, g.w);
    for (int i = 0; i < g.n(); ++i) x.v[i] = std::max(static_cast<double>(g.v[i]) - med, 1e-3);
    CoeffField c = Phi.adjoint(x);
    c.background = med / background_atom_scale;
    return c;
}

std::pair<CoeffField, SolveTrace> gis_solve(const ImageGrid& g, const LinearOp& A, const GisOptions& opt,
                                            const ReconstructFn& recon, const ImageGrid* truth,
                                            const ReconstructFn& eval_recon) {
    if (!(opt.mu > 0.0)) throw std::invalid_argument("gis_solve: mu must be positive");
    SolveTrace trace;
    double bound = operator_norm_sq(A, 60, 0xC0FFEEULL);
    if (opt.mu <= bound)
        trace.warnings.push_back("gis_solve: mu " + std::to_string(opt.mu) +
                                 " is not above the operator norm bound " + std::to_string(bound));

    CoeffField c = A.input_shape().zeros();
    ImageGrid lam = A.apply(c);
    double thr = opt.gamma / opt.mu;

    auto gauss_objective = [&](const CoeffField& cc, const ImageGrid& ll) {
        KahanSum s;
        for (int i = 0; i < ll.n(); ++i) {
            double r = g.v[i] - ll.v[i];
            s.add(0.5 * r * r);
        }
        return s.value() + opt.gamma * band_l1(cc, !opt.exempt_background);
    };

    const ReconstructFn& for_nmse = eval_recon ? eval_recon : recon;
    auto eval_nmse = [&](const CoeffField& cc) -> std::pair<bool, double> {
        if (!truth || !for_nmse) return {false, 0.0};
        return {true, nmse(*truth, for_nmse(cc))};
    };

    {
        TraceRow r0;
        r0.t = 0;
        r0.objective = gauss_objective(c, lam);
        auto [has, v] = eval_nmse(c);
        r0.has_nmse = has;
        r0.nmse = v;
        trace.rows.push_back(r0);
    }

    ImageGrid f_prev;
    if (recon) f_prev = recon(c);

    for (int t = 1; t <= opt.stop.max_iter; ++t) {
        ImageGrid resid(lam.h, lam.w);
        for (int i = 0; i < lam.n(); ++i) resid.v[i] = g.v[i] - lam.v[i];
        CoeffField step = A.adjoint(resid);
        CoeffField c_next = c;
        for (size_t k = 0; k < c_next.bands.size(); ++k) {
            auto& x = c_next.bands[k].img;
            const auto& sv = step.bands[k].img;
            for (int i = 0; i < x.n(); ++i) x.v[i] = soft_scalar(x.v[i] + sv.v[i] / opt.mu, thr);
        }
        if (c_next.background) {
            double bg = *c.background + *step.background / opt.mu;
            if (!opt.exempt_background) bg = soft_scalar(bg, thr);
            *c_next.background = bg;
        }
        lam = A.apply(c_next);

        TraceRow row;
        row.t = t;
        row.objective = gauss_objective(c_next, lam);
        row.mu = opt.mu;
        row.has_mu = true;
        if (recon) {
            ImageGrid f_now = recon(c_next);
            row.rel_change = safe_rel_change(f_prev, f_now);
            f_prev = std::move(f_now);
        } else {
            row.rel_change = coeff_rel_change(c, c_next);
        }
        auto [has, v] = eval_nmse(c_next);
        row.has_nmse = has;
        row.nmse = v;
        trace.rows.push_back(row);
        c = std::move(c_next);

        if (opt.stop.rel_tol > 0.0 && row.rel_change < opt.stop.rel_tol) {
            trace.termination = "rel_tol";
            return {std::move(c), std::move(trace)};
        }
    }
    trace.termination = "max_iter";
    return {std::move(c), std::move(trace)};
}

namespace {

// Shared RL/RLTV core. gamma_tv == 0 reproduces plain RL bit-for-bit: the
// denominator is exactly 1 there and x/1.0 == x in IEEE arithmetic.
RlResult rl_core(const CountGrid& g, const Kernel& H, const ImageGrid& f0, double gamma_tv, int max_iter,
                 const ImageGrid* truth, bool with_tv) {
    constexpr double kEpsTv = 1e-8;
    for (double x : f0.v)
        if (!(x > 0.0)) throw std::invalid_argument("rl_solve: initial iterate must be positive everywhere");
    auto khat = detail::kernel_hat(H, f0.h, f0.w);
    auto conv_fwd = [&](const ImageGrid& x) {
        auto spec = detail::rfft2(x);
        for (size_t i = 0; i < spec.size(); ++i) spec[i] *= khat[i];
        return detail::irfft2(std::move(spec), x.h, x.w);
    };
    auto conv_adj = [&](const ImageGrid& x) {
        auto spec = detail::rfft2(x);
        for (size_t i = 0; i < spec.size(); ++i) spec[i] *= std::conj(khat[i]);
        return detail::irfft2(std::move(spec), x.h, x.w);
    };

    auto nll = [&](const ImageGrid& hf) {
        KahanSum s;
        for (int i = 0; i < hf.n(); ++i) {
            s.add(hf.v[i]);
            if (g.v[i] > 0) s.add(-static_cast<double>(g.v[i]) * std::log(std::max(hf.v[i], kLogFloor)));
        }
        return s.value();
    };

    RlResult res;
    res.final = f0;
    SolveTrace& trace = res.trace;

    ImageGrid hf = conv_fwd(res.final);
    {
        TraceRow r0;
        r0.t = 0;
        r0.objective = nll(hf);
        if (truth) {
            r0.has_nmse = true;
            r0.nmse = nmse(*truth, res.final);
            res.best = res.final;
            res.best_iter = 0;
            res.best_nmse = r0.nmse;
        }
        trace.rows.push_back(r0);
    }

    for (int t = 1; t <= max_iter; ++t) {
        for (int i = 0; i < hf.n(); ++i) {
            if (hf.v[i] <= 0.0 && g.v[i] > 0) {
                trace.termination = "error";
                throw SolverDomainError("rl_solve: H[f] reached zero where counts are positive",
                                        std::move(trace));
            }
        }
        ImageGrid ratio(hf.h, hf.w);
        for (int i = 0; i < hf.n(); ++i)
            ratio.v[i] = g.v[i] > 0 ? static_cast<double>(g.v[i]) / hf.v[i] : 0.0;
        ImageGrid u = conv_adj(ratio);

        ImageGrid base = res.final;
        if (with_tv) {
            ImageGrid kappa = curvature(res.final, kEpsTv);
            for (int i = 0; i < base.n(); ++i) {
                double denom = 1.0 - gamma_tv * kappa.v[i];
                if (denom <= 0.0) {
                    trace.termination = "error";
                    throw SolverDomainError("rltv_solve: nonpositive denominator at pixel (" +
                                                std::to_string(i / base.w) + "," + std::to_string(i % base.w) +
                                                "); gamma_tv too large",
                                            std::move(trace));
                }
                base.v[i] = base.v[i] / denom;
            }
        }
        ImageGrid f_next(base.h, base.w);
        for (int i = 0; i < base.n(); ++i) f_next.v[i] = base.v[i] * u.v[i];

        hf = conv_fwd(f_next);
        TraceRow row;
        row.t = t;
        row.objective = nll(hf);
        row.rel_change = safe_rel_change(res.final, f_next);
        if (truth) {
            row.has_nmse = true;
            row.nmse = nmse(*truth, f_next);
            if (row.nmse < res.best_nmse) {
                res.best = f_next;
                res.best_iter = t;
                res.best_nmse = row.nmse;
            }
        }
        trace.rows.push_back(row);
        res.final = std::move(f_next);
    }
    trace.termination = "max_iter";
    return res;
}

}  // namespace

RlResult rl_solve(const CountGrid& g, const Kernel& H, const ImageGrid& f0, int max_iter, const ImageGrid* truth) {
    return rl_core(g, H, f0, 0.0, max_iter, truth, false);
}

RlResult rltv_solve(const CountGrid& g, const Kernel& H, const ImageGrid& f0, double gamma_tv, int max_iter,
                    const ImageGrid* truth) {
    if (!(gamma_tv >= 0.0)) throw std::invalid_argument("rltv_solve: gamma_tv must be nonnegative");
    return rl_core(g, H, f0, gamma_tv, max_iter, truth, true);
}

ImageGrid curvature(const ImageGrid& f, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("curvature: eps must be positive");
    int h = f.h, w = f.w;
    ImageGrid px(h, w), py(h, w);
    for (int i = 0; i < h; ++i) {
        int ip = (i + 1) % h;
        for (int j = 0; j < w; ++j) {
            int jp = (j + 1) % w;
            double fx = f.at(i, jp) - f.at(i, j);
            double fy = f.at(ip, j) - f.at(i, j);
            double nrm = std::sqrt(fx * fx + fy * fy + eps * eps);
            px.at(i, j) = fx / nrm;
            py.at(i, j) = fy / nrm;
        }
    }
    ImageGrid div(h, w);
    for (int i = 0; i < h; ++i) {
        int im = (i - 1 + h) % h;
        for (int j = 0; j < w; ++j) {
            int jm = (j - 1 + w) % w;
            div.at(i, j) = px.at(i, j) - px.at(i, jm) + py.at(i, j) - py.at(im, j);
        }
    }
    return div;
}

}  // namespace pir
