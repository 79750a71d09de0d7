// Reference implementations used only by tests: plain-loop re-codings of the
// library's math, kept deliberately naive and separate from the core sources.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "pir/grid.hpp"
#include "pir/operators.hpp"

namespace oracle {

// periodic spatial-domain convolution, O(n * (2D+1)^2)
inline pir::ImageGrid brute_convolve(const pir::ImageGrid& f, const pir::Kernel& h, bool adjoint = false) {
    pir::ImageGrid out(f.h, f.w, 0.0);
    for (int i = 0; i < f.h; ++i)
        for (int j = 0; j < f.w; ++j) {
            double acc = 0.0;
            for (int di = -h.D; di <= h.D; ++di)
                for (int dj = -h.D; dj <= h.D; ++dj) {
                    int si = ((adjoint ? i + di : i - di) % f.h + f.h) % f.h;
                    int sj = ((adjoint ? j + dj : j - dj) % f.w + f.w) % f.w;
                    acc += h.at(di, dj) * f.at(si, sj);
                }
            out.at(i, j) = acc;
        }
    return out;
}

// largest |DFT(h)|^2 of the zero-padded kernel, by direct O(n^2) DFT
inline double max_dft_power(const pir::Kernel& h, int H, int W) {
    double best = 0.0;
    for (int u = 0; u < H; ++u)
        for (int v = 0; v < W; ++v) {
            std::complex<double> acc(0.0, 0.0);
            for (int di = -h.D; di <= h.D; ++di)
                for (int dj = -h.D; dj <= h.D; ++dj) {
                    double ph = -2.0 * M_PI * (double(u) * di / H + double(v) * dj / W);
                    acc += h.at(di, dj) * std::complex<double>(std::cos(ph), std::sin(ph));
                }
            best = std::max(best, std::norm(acc));
        }
    return best;
}

// flatten a CoeffField (bands then background) for scalar loops
inline std::vector<double> flatten(const pir::CoeffField& c) {
    std::vector<double> out;
    for (const auto& b : c.bands) out.insert(out.end(), b.img.v.begin(), b.img.v.end());
    if (c.background) out.push_back(*c.background);
    return out;
}

// E(c) assembled with plain accumulation from a precomputed A[c]
inline double scalar_objective(const pir::ImageGrid& lam, const pir::CountGrid& g,
                               const pir::CoeffField& c, double gamma, bool penalize_background) {
    double e = 0.0;
    for (int i = 0; i < lam.n(); ++i) e += lam.v[i] - double(g.v[i]) * std::log(lam.v[i]);
    for (const auto& b : c.bands)
        for (double x : b.img.v) e += gamma * std::fabs(x);
    if (c.background && penalize_background) e += gamma * std::fabs(*c.background);
    return e;
}

// F(c_next, c_t) with u = A*[g/A[c_t]] precomputed
inline double scalar_surrogate_gap(const pir::CoeffField& u, const pir::CoeffField& c_next,
                                   const pir::CoeffField& c_t, const pir::CountGrid& g,
                                   const pir::ImageGrid& lam_next, const pir::ImageGrid& lam_t) {
    std::vector<double> uf = flatten(u), nf = flatten(c_next), tf = flatten(c_t);
    double e = 0.0;
    for (size_t k = 0; k < uf.size(); ++k) e += uf[k] * (nf[k] - tf[k]);
    for (int i = 0; i < lam_t.n(); ++i) e -= double(g.v[i]) * std::log(lam_next.v[i] / lam_t.v[i]);
    return e;
}

// argmin_x 0.5*mu*(x-c)^2 + gamma*|x| by coarse-to-fine grid search
inline double prox_grid_argmin(double c, double gamma, double mu) {
    double lo = -std::fabs(c) - 1.0, hi = std::fabs(c) + 1.0;
    double best_x = 0.0;
    for (int pass = 0; pass < 3; ++pass) {
        double step = (hi - lo) / 2000.0;
        double best_v = 1e300;
        for (int k = 0; k <= 2000; ++k) {
            double x = lo + k * step;
            double v = 0.5 * mu * (x - c) * (x - c) + gamma * std::fabs(x);
            if (v < best_v) {
                best_v = v;
                best_x = x;
            }
        }
        // exact zero is always a candidate for the l1 term's kink
        double v0 = 0.5 * mu * c * c;
        if (v0 < best_v) best_x = 0.0;
        lo = best_x - step;
        hi = best_x + step;
    }
    return best_x;
}

// direct single-window SSIM evaluator; 11x11 Gaussian sigma 1.5, valid windows
inline double ssim_direct(const pir::ImageGrid& x, const pir::ImageGrid& y, double range) {
    const int R = 5;
    double wgt[11][11];
    double wsum = 0.0;
    for (int i = -R; i <= R; ++i)
        for (int j = -R; j <= R; ++j) {
            wgt[i + R][j + R] = std::exp(-(i * i + j * j) / (2.0 * 1.5 * 1.5));
            wsum += wgt[i + R][j + R];
        }
    for (auto& row : wgt)
        for (double& v : row) v /= wsum;
    const double C1 = (0.01 * range) * (0.01 * range);
    const double C2 = (0.03 * range) * (0.03 * range);
    double acc = 0.0;
    int cnt = 0;
    for (int ci = R; ci < x.h - R; ++ci)
        for (int cj = R; cj < x.w - R; ++cj) {
            double mx = 0, my = 0;
            for (int i = -R; i <= R; ++i)
                for (int j = -R; j <= R; ++j) {
                    mx += wgt[i + R][j + R] * x.at(ci + i, cj + j);
                    my += wgt[i + R][j + R] * y.at(ci + i, cj + j);
                }
            double vx = 0, vy = 0, cxy = 0;
            for (int i = -R; i <= R; ++i)
                for (int j = -R; j <= R; ++j) {
                    double dx = x.at(ci + i, cj + j) - mx;
                    double dy = y.at(ci + i, cj + j) - my;
                    vx += wgt[i + R][j + R] * dx * dx;
                    vy += wgt[i + R][j + R] * dy * dy;
                    cxy += wgt[i + R][j + R] * dx * dy;
                }
            acc += (2 * mx * my + C1) * (2 * cxy + C2) /
                   ((mx * mx + my * my + C1) * (vx + vy + C2));
            ++cnt;
        }
    return acc / cnt;
}

// one RL step via plain loops: f .* Hadj[g ./ H[f]]
inline pir::ImageGrid rl_scalar_step(const pir::ImageGrid& f, const pir::CountGrid& g,
                                     const pir::Kernel& h) {
    pir::ImageGrid hf = brute_convolve(f, h, false);
    pir::ImageGrid ratio(f.h, f.w, 0.0);
    for (int i = 0; i < f.n(); ++i) ratio.v[i] = double(g.v[i]) / hf.v[i];
    pir::ImageGrid corr = brute_convolve(ratio, h, true);
    pir::ImageGrid out(f.h, f.w, 0.0);
    for (int i = 0; i < f.n(); ++i) out.v[i] = f.v[i] * corr.v[i];
    return out;
}

// the RLTV curvature discretization, re-coded: forward-diff gradient,
// eps-regularized norm, backward-diff divergence, periodic
inline pir::ImageGrid curvature_scalar(const pir::ImageGrid& f, double eps) {
    int H = f.h, W = f.w;
    pir::ImageGrid nx(H, W, 0.0), ny(H, W, 0.0), out(H, W, 0.0);
    for (int i = 0; i < H; ++i)
        for (int j = 0; j < W; ++j) {
            double fx = f.at((i + 1) % H, j) - f.at(i, j);
            double fy = f.at(i, (j + 1) % W) - f.at(i, j);
            double nrm = std::sqrt(fx * fx + fy * fy + eps * eps);
            nx.at(i, j) = fx / nrm;
            ny.at(i, j) = fy / nrm;
        }
    for (int i = 0; i < H; ++i)
        for (int j = 0; j < W; ++j)
            out.at(i, j) = nx.at(i, j) - nx.at((i - 1 + H) % H, j) + ny.at(i, j) - ny.at(i, (j - 1 + W) % W);
    return out;
}

inline pir::ImageGrid rltv_scalar_step(const pir::ImageGrid& f, const pir::CountGrid& g,
                                       const pir::Kernel& h, double gamma_tv, double eps) {
    pir::ImageGrid rl = rl_scalar_step(f, g, h);
    pir::ImageGrid kappa = curvature_scalar(f, eps);
    pir::ImageGrid out(f.h, f.w, 0.0);
    for (int i = 0; i < f.n(); ++i) out.v[i] = rl.v[i] / (1.0 - gamma_tv * kappa.v[i]);
    return out;
}

// coordinate-wise dense grid minimizer of x - g*log(x) + gamma*x over x > 0
inline double poisson_1d_grid_argmin(double gcount, double gamma, double hi) {
    double best_v = 1e300, best_x = 1e-6;
    double lo = 1e-6;
    for (int pass = 0; pass < 3; ++pass) {
        double step = (hi - lo) / 4000.0;
        for (int k = 0; k <= 4000; ++k) {
            double x = lo + k * step;
            if (x <= 0) continue;
            double v = x - gcount * std::log(x) + gamma * x;
            if (v < best_v) {
                best_v = v;
                best_x = x;
            }
        }
        lo = std::max(best_x - step, 1e-9);
        hi = best_x + step;
    }
    return best_x;
}

// dense grid minimizer of 0.5*(g-x)^2 + gamma*|x| (lasso with A = I)
inline double lasso_1d_grid_argmin(double gval, double gamma) {
    double lo = -std::fabs(gval) - 1.0, hi = std::fabs(gval) + 1.0;
    double best_v = 1e300, best_x = 0.0;
    for (int pass = 0; pass < 3; ++pass) {
        double step = (hi - lo) / 4000.0;
        for (int k = 0; k <= 4000; ++k) {
            double x = lo + k * step;
            double v = 0.5 * (gval - x) * (gval - x) + gamma * std::fabs(x);
            if (v < best_v) {
                best_v = v;
                best_x = x;
            }
        }
        lo = best_x - step;
        hi = best_x + step;
    }
    return best_x;
}

}  // namespace oracle
