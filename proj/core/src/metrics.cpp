#include "pir/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace pir {

double nmse(const ImageGrid& f_true, const ImageGrid& f_est) {
    if (!f_true.same_shape(f_est)) throw std::invalid_argument("nmse: dimension mismatch");
    KahanSum num, den;
    for (int i = 0; i < f_true.n(); ++i) {
        double d = f_true.v[i] - f_est.v[i];
        num.add(d * d);
        den.add(f_true.v[i] * f_true.v[i]);
    }
    if (den.value() <= 0.0) throw std::invalid_argument("nmse: zero true image");
    return num.value() / den.value();
}

namespace {

constexpr int kWin = 11;

const double* ssim_window() {
    static double w[kWin * kWin];
    static bool init = false;
    if (!init) {
        double sum = 0.0;
        for (int i = 0; i < kWin; ++i)
            for (int j = 0; j < kWin; ++j) {
                double di = i - 5, dj = j - 5;
                w[i * kWin + j] = std::exp(-(di * di + dj * dj) / (2.0 * 1.5 * 1.5));
                sum += w[i * kWin + j];
            }
        for (double& x : w) x /= sum;
        init = true;
    }
    return w;
}

}  // namespace

double ssim(const ImageGrid& f_true, const ImageGrid& f_est, double dynamic_range) {
    if (!f_true.same_shape(f_est)) throw std::invalid_argument("ssim: dimension mismatch");
    if (!(dynamic_range > 0.0)) throw std::invalid_argument("ssim: dynamic range must be positive");
    if (f_true.h < kWin || f_true.w < kWin) throw std::invalid_argument("ssim: image smaller than 11x11 window");
    const double* W = ssim_window();
    double C1 = 0.01 * dynamic_range;
    C1 *= C1;
    double C2 = 0.03 * dynamic_range;
    C2 *= C2;

    KahanSum acc;
    long long count = 0;
    for (int i = 0; i + kWin <= f_true.h; ++i) {
        for (int j = 0; j + kWin <= f_true.w; ++j) {
            double mx = 0, my = 0, mxx = 0, myy = 0, mxy = 0;
            for (int a = 0; a < kWin; ++a) {
                const double* xr = &f_true.v[static_cast<size_t>(i + a) * f_true.w + j];
                const double* yr = &f_est.v[static_cast<size_t>(i + a) * f_est.w + j];
                const double* wr = &W[a * kWin];
                for (int b = 0; b < kWin; ++b) {
                    double x = xr[b], y = yr[b], w = wr[b];
                    mx += w * x;
                    my += w * y;
                    mxx += w * x * x;
                    myy += w * y * y;
                    mxy += w * x * y;
                }
            }
            double vx = mxx - mx * mx;
            double vy = myy - my * my;
            double cxy = mxy - mx * my;
            double s = ((2.0 * mx * my + C1) * (2.0 * cxy + C2)) /
                       ((mx * mx + my * my + C1) * (vx + vy + C2));
            acc.add(s);
            ++count;
        }
    }
    return acc.value() / static_cast<double>(count);
}

AggregateResult aggregate(const std::vector<TrialSummary>& trials) {
    if (trials.empty()) throw std::invalid_argument("aggregate: no trials");
    AggregateResult r;
    size_t n = trials.size();
    for (const auto& t : trials) {
        r.mean_nmse += t.nmse;
        r.mean_ssim += t.ssim;
    }
    r.mean_nmse /= static_cast<double>(n);
    r.mean_ssim /= static_cast<double>(n);
    if (n > 1) {
        double vn = 0, vs = 0;
        for (const auto& t : trials) {
            vn += (t.nmse - r.mean_nmse) * (t.nmse - r.mean_nmse);
            vs += (t.ssim - r.mean_ssim) * (t.ssim - r.mean_ssim);
        }
        vn /= static_cast<double>(n - 1);
        vs /= static_cast<double>(n - 1);
        r.stderr_nmse = std::sqrt(vn / static_cast<double>(n));
        r.stderr_ssim = std::sqrt(vs / static_cast<double>(n));
    }
    return r;
}

double relative_change(const ImageGrid& f_prev, const ImageGrid& f_next) {
    if (!f_prev.same_shape(f_next)) throw std::invalid_argument("relative_change: dimension mismatch");
    double np = norm(f_prev);
    if (np <= 0.0) throw std::invalid_argument("relative_change: zero previous iterate");
    KahanSum s;
    for (int i = 0; i < f_prev.n(); ++i) {
        double d = f_next.v[i] - f_prev.v[i];
        s.add(d * d);
    }
    return std::sqrt(s.value()) / np;
}

}  // namespace pir
