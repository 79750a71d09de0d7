#include "pir/operators.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "fft_internal.hpp"
#include "pir/rng.hpp"

namespace pir {
namespace {

ImageGrid shift(const ImageGrid& a, int di, int dj) {
    ImageGrid out(a.h, a.w);
    for (int i = 0; i < a.h; ++i) {
        int si = (i + di) % a.h;
        if (si < 0) si += a.h;
        for (int j = 0; j < a.w; ++j) {
            int sj = (j + dj) % a.w;
            if (sj < 0) sj += a.w;
            out.at(i, j) = a.at(si, sj);
        }
    }
    return out;
}

// One a-trous Haar level along one axis, filters (1/2, 1/2) / (1/2, -1/2):
// with these weights analysis followed by its adjoint is the exact identity.
void ana_pair(const ImageGrid& a, int s, int axis, ImageGrid& lo, ImageGrid& hi) {
    ImageGrid sh = axis == 0 ? shift(a, s, 0) : shift(a, 0, s);
    lo = a;
    hi = a;
    for (int i = 0; i < a.n(); ++i) {
        lo.v[i] = 0.5 * (a.v[i] + sh.v[i]);
        hi.v[i] = 0.5 * (a.v[i] - sh.v[i]);
    }
}

ImageGrid adj_lo(const ImageGrid& y, int s, int axis) {
    ImageGrid sh = axis == 0 ? shift(y, -s, 0) : shift(y, 0, -s);
    ImageGrid out(y.h, y.w);
    for (int i = 0; i < y.n(); ++i) out.v[i] = 0.5 * (y.v[i] + sh.v[i]);
    return out;
}

ImageGrid adj_hi(const ImageGrid& y, int s, int axis) {
    ImageGrid sh = axis == 0 ? shift(y, -s, 0) : shift(y, 0, -s);
    ImageGrid out(y.h, y.w);
    for (int i = 0; i < y.n(); ++i) out.v[i] = 0.5 * (y.v[i] - sh.v[i]);
    return out;
}

void check_levels(int h, int w, int levels) {
    if (levels < 1) throw std::invalid_argument("ti_haar: levels must be >= 1");
    int m = 1 << levels;
    if (h % m != 0 || w % m != 0)
        throw std::invalid_argument("ti_haar: image dimensions must be divisible by 2^levels");
}

std::vector<std::complex<double>> spectrum_times(const ImageGrid& f, const std::vector<std::complex<double>>& khat,
                                                 bool conj) {
    auto spec = detail::rfft2(f);
    for (size_t i = 0; i < spec.size(); ++i) spec[i] *= conj ? std::conj(khat[i]) : khat[i];
    return spec;
}

}  // namespace

ImageGrid from_single_band(const CoeffField& c) {
    if (c.bands.size() != 1 || c.background)
        throw std::invalid_argument("expected a single-band coefficient field without background");
    return c.bands[0].img;
}

CoeffField to_single_band(const ImageGrid& f) {
    CoeffField c;
    c.bands.push_back({"pixels", f});
    return c;
}

CoeffField CoeffShape::zeros() const {
    CoeffField c;
    for (const auto& id : band_ids) c.bands.push_back({id, ImageGrid(h, w)});
    if (has_background) c.background = 0.0;
    return c;
}

ImageGrid convolve(const ImageGrid& f, const Kernel& h) {
    if (2 * h.D + 1 > f.h || 2 * h.D + 1 > f.w)
        throw std::invalid_argument("convolve: kernel support exceeds image");
    auto khat = detail::kernel_hat(h, f.h, f.w);
    return detail::irfft2(spectrum_times(f, khat, false), f.h, f.w);
}

ImageGrid convolve_adjoint(const ImageGrid& y, const Kernel& h) {
    if (2 * h.D + 1 > y.h || 2 * h.D + 1 > y.w)
        throw std::invalid_argument("convolve_adjoint: kernel support exceeds image");
    auto khat = detail::kernel_hat(h, y.h, y.w);
    return detail::irfft2(spectrum_times(y, khat, true), y.h, y.w);
}

CoeffField ti_haar_analysis(const ImageGrid& f, int levels) {
    check_levels(f.h, f.w, levels);
    CoeffField out;
    ImageGrid approx = f;
    for (int j = 1; j <= levels; ++j) {
        int s = 1 << (j - 1);
        ImageGrid l0, h0;
        ana_pair(approx, s, 0, l0, h0);
        ImageGrid ll, lh, hl, hh;
        ana_pair(l0, s, 1, ll, lh);
        ana_pair(h0, s, 1, hl, hh);
        std::string lev = "d" + std::to_string(j);
        out.bands.push_back({lev + "_lh", std::move(lh)});
        out.bands.push_back({lev + "_hl", std::move(hl)});
        out.bands.push_back({lev + "_hh", std::move(hh)});
        approx = std::move(ll);
    }
    out.bands.push_back({"approx", std::move(approx)});
    return out;
}

ImageGrid ti_haar_synthesis(const CoeffField& c, int levels) {
    if (static_cast<int>(c.bands.size()) != 3 * levels + 1)
        throw std::invalid_argument("ti_haar_synthesis: want 3*levels+1 bands");
    if (c.background) throw std::invalid_argument("ti_haar_synthesis: unexpected background slot");
    check_levels(c.bands[0].img.h, c.bands[0].img.w, levels);
    ImageGrid a = c.bands.back().img;  // approx
    for (int j = levels; j >= 1; --j) {
        int s = 1 << (j - 1);
        const ImageGrid& lh = c.bands[static_cast<size_t>(3 * (j - 1))].img;
        const ImageGrid& hl = c.bands[static_cast<size_t>(3 * (j - 1) + 1)].img;
        const ImageGrid& hh = c.bands[static_cast<size_t>(3 * (j - 1) + 2)].img;
        ImageGrid low = adj_lo(a, s, 1);
        {
            ImageGrid t = adj_hi(lh, s, 1);
            for (int i = 0; i < low.n(); ++i) low.v[i] += t.v[i];
        }
        ImageGrid high = adj_lo(hl, s, 1);
        {
            ImageGrid t = adj_hi(hh, s, 1);
            for (int i = 0; i < high.n(); ++i) high.v[i] += t.v[i];
        }
        ImageGrid out = adj_lo(low, s, 0);
        ImageGrid t = adj_hi(high, s, 0);
        for (int i = 0; i < out.n(); ++i) out.v[i] += t.v[i];
        a = std::move(out);
    }
    return a;
}

namespace {

class IdentityOp final : public LinearOp {
public:
    IdentityOp(int h, int w, double scale) : h_(h), w_(w), scale_(scale) {}
    ImageGrid apply(const CoeffField& c) const override {
        ImageGrid f = from_single_band(c);
        if (!(f.h == h_ && f.w == w_)) throw std::invalid_argument("identity_op: shape mismatch");
        if (scale_ != 1.0)
            for (double& x : f.v) x *= scale_;
        return f;
    }
    CoeffField adjoint(const ImageGrid& y) const override {
        ImageGrid f = y;
        if (scale_ != 1.0)
            for (double& x : f.v) x *= scale_;
        return to_single_band(f);
    }
    CoeffShape input_shape() const override { return {{"pixels"}, h_, w_, false}; }
    ShapeDesc output_shape() const override { return {h_, w_}; }

private:
    int h_, w_;
    double scale_;
};

class ConvOp final : public LinearOp {
public:
    ConvOp(const Kernel& k, int h, int w) : h_(h), w_(w) {
        if (2 * k.D + 1 > h || 2 * k.D + 1 > w)
            throw std::invalid_argument("convolution_op: kernel support exceeds image");
        khat_ = detail::kernel_hat(k, h, w);
    }
    ImageGrid apply(const CoeffField& c) const override {
        ImageGrid f = from_single_band(c);
        return detail::irfft2(spectrum_times(f, khat_, false), h_, w_);
    }
    CoeffField adjoint(const ImageGrid& y) const override {
        return to_single_band(detail::irfft2(spectrum_times(y, khat_, true), h_, w_));
    }
    CoeffShape input_shape() const override { return {{"pixels"}, h_, w_, false}; }
    ShapeDesc output_shape() const override { return {h_, w_}; }

private:
    int h_, w_;
    std::vector<std::complex<double>> khat_;
};

class TiHaarOp final : public LinearOp {
public:
    TiHaarOp(int h, int w, int levels) : h_(h), w_(w), levels_(levels) { check_levels(h, w, levels); }
    ImageGrid apply(const CoeffField& c) const override { return ti_haar_synthesis(c, levels_); }
    CoeffField adjoint(const ImageGrid& y) const override { return ti_haar_analysis(y, levels_); }
    CoeffShape input_shape() const override {
        CoeffShape s{{}, h_, w_, false};
        for (int j = 1; j <= levels_; ++j) {
            std::string lev = "d" + std::to_string(j);
            s.band_ids.push_back(lev + "_lh");
            s.band_ids.push_back(lev + "_hl");
            s.band_ids.push_back(lev + "_hh");
        }
        s.band_ids.push_back("approx");
        return s;
    }
    ShapeDesc output_shape() const override { return {h_, w_}; }

private:
    int h_, w_, levels_;
};

class ComposeOp final : public LinearOp {
public:
    ComposeOp(LinearOpPtr H, LinearOpPtr Phi) : H_(std::move(H)), Phi_(std::move(Phi)) {
        CoeffShape hin = H_->input_shape();
        ShapeDesc pout = Phi_->output_shape();
        if (hin.band_ids.size() != 1 || hin.has_background || hin.h != pout.h || hin.w != pout.w)
            throw std::invalid_argument("compose: frame output shape does not match blur input shape");
    }
    ImageGrid apply(const CoeffField& c) const override { return H_->apply(to_single_band(Phi_->apply(c))); }
    CoeffField adjoint(const ImageGrid& y) const override {
        return Phi_->adjoint(from_single_band(H_->adjoint(y)));
    }
    CoeffShape input_shape() const override { return Phi_->input_shape(); }
    ShapeDesc output_shape() const override { return H_->output_shape(); }

private:
    LinearOpPtr H_, Phi_;
};

class AugmentOp final : public LinearOp {
public:
    AugmentOp(LinearOpPtr A, double atom_scale) : A_(std::move(A)), scale_(atom_scale) {
        if (A_->input_shape().has_background)
            throw std::invalid_argument("augment_background: operator already augmented");
    }
    ImageGrid apply(const CoeffField& c) const override {
        if (!c.background) throw std::invalid_argument("augment_background: missing background slot");
        CoeffField inner = c;
        inner.background.reset();
        ImageGrid out = A_->apply(inner);
        double add = scale_ * *c.background;
        for (double& x : out.v) x += add;
        return out;
    }
    CoeffField adjoint(const ImageGrid& y) const override {
        CoeffField out = A_->adjoint(y);
        KahanSum s;
        for (double x : y.v) s.add(x);
        out.background = scale_ * s.value();
        return out;
    }
    CoeffShape input_shape() const override {
        CoeffShape s = A_->input_shape();
        s.has_background = true;
        return s;
    }
    ShapeDesc output_shape() const override { return A_->output_shape(); }

private:
    LinearOpPtr A_;
    double scale_;
};

}  // namespace

LinearOpPtr identity_op(int h, int w, double scale) { return std::make_shared<IdentityOp>(h, w, scale); }
LinearOpPtr convolution_op(const Kernel& k, int h, int w) { return std::make_shared<ConvOp>(k, h, w); }
LinearOpPtr ti_haar_op(int h, int w, int levels) { return std::make_shared<TiHaarOp>(h, w, levels); }
LinearOpPtr compose(LinearOpPtr H_op, LinearOpPtr Phi_op) {
    return std::make_shared<ComposeOp>(std::move(H_op), std::move(Phi_op));
}
LinearOpPtr augment_background(LinearOpPtr A, double atom_scale) {
    return std::make_shared<AugmentOp>(std::move(A), atom_scale);
}

double operator_norm_sq(const LinearOp& A, int iterations, std::uint64_t seed) {
    if (iterations < 1) throw std::invalid_argument("operator_norm_sq: iterations must be >= 1");
    CoeffShape shp = A.input_shape();
    CoeffField c;
    for (int attempt = 0; attempt < 8; ++attempt) {
        c = shp.zeros();
        Xoshiro256pp rng(seed + static_cast<std::uint64_t>(attempt));
        for (auto& b : c.bands)
            for (double& x : b.img.v) x = rng.uniform01();
        if (c.background) *c.background = rng.uniform01();
        double n0 = std::sqrt(coeff_norm_sq(c));
        if (n0 > 0) {
            for (auto& b : c.bands)
                for (double& x : b.img.v) x /= n0;
            if (c.background) *c.background /= n0;
            break;
        }
        if (attempt == 7) throw std::runtime_error("operator_norm_sq: could not draw a nonzero start vector");
    }
    double est = 0.0;
    for (int it = 0; it < iterations; ++it) {
        CoeffField next = A.adjoint(A.apply(c));
        est = std::sqrt(coeff_norm_sq(next));
        if (est == 0.0) return 0.0;  // A*A annihilated the iterate
        for (auto& b : next.bands)
            for (double& x : b.img.v) x /= est;
        if (next.background) *next.background /= est;
        c = std::move(next);
    }
    return est;
}

}  // namespace pir
