#include "pir/grid.hpp"

#include <cmath>

namespace pir {

ImageGrid to_image(const CountGrid& g) {
    ImageGrid out(g.h, g.w);
    for (int i = 0; i < g.n(); ++i) out.v[i] = static_cast<double>(g.v[i]);
    return out;
}

bool CoeffField::same_structure(const CoeffField& o) const {
    if (bands.size() != o.bands.size()) return false;
    if (background.has_value() != o.background.has_value()) return false;
    for (size_t k = 0; k < bands.size(); ++k) {
        if (bands[k].id != o.bands[k].id) return false;
        if (!bands[k].img.same_shape(o.bands[k].img)) return false;
    }
    return true;
}

const ImageGrid& CoeffField::band(const std::string& id) const {
    for (const auto& b : bands)
        if (b.id == id) return b.img;
    throw std::invalid_argument("CoeffField: no band '" + id + "'");
}

double inner_product(const ImageGrid& a, const ImageGrid& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("inner_product: dimension mismatch");
    KahanSum s;
    for (int i = 0; i < a.n(); ++i) s.add(a.v[i] * b.v[i]);
    return s.value();
}

double coeff_inner_product(const CoeffField& a, const CoeffField& b) {
    if (!a.same_structure(b)) throw std::invalid_argument("coeff_inner_product: band-structure mismatch");
    KahanSum s;
    for (size_t k = 0; k < a.bands.size(); ++k) {
        const auto& x = a.bands[k].img;
        const auto& y = b.bands[k].img;
        for (int i = 0; i < x.n(); ++i) s.add(x.v[i] * y.v[i]);
    }
    if (a.background) s.add(*a.background * *b.background);
    return s.value();
}

double lp_norm_p(const CoeffField& c, double p) {
    if (p < 1.0) throw std::invalid_argument("lp_norm_p: p < 1 outside the convex regime");
    KahanSum s;
    for (const auto& b : c.bands)
        for (double x : b.img.v) s.add(p == 1.0 ? std::fabs(x) : std::pow(std::fabs(x), p));
    if (c.background) s.add(p == 1.0 ? std::fabs(*c.background) : std::pow(std::fabs(*c.background), p));
    return s.value();
}

double norm_sq(const ImageGrid& a) {
    KahanSum s;
    for (double x : a.v) s.add(x * x);
    return s.value();
}

double norm(const ImageGrid& a) { return std::sqrt(norm_sq(a)); }

double coeff_norm_sq(const CoeffField& a) {
    KahanSum s;
    for (const auto& b : a.bands)
        for (double x : b.img.v) s.add(x * x);
    if (a.background) s.add(*a.background * *a.background);
    return s.value();
}

CoeffField coeff_axpy(const CoeffField& a, const CoeffField& b, double t) {
    if (!a.same_structure(b)) throw std::invalid_argument("coeff_axpy: band-structure mismatch");
    CoeffField out = a;
    for (size_t k = 0; k < out.bands.size(); ++k) {
        auto& x = out.bands[k].img;
        const auto& y = b.bands[k].img;
        for (int i = 0; i < x.n(); ++i) x.v[i] += t * y.v[i];
    }
    if (out.background) *out.background += t * *b.background;
    return out;
}

}  // namespace pir
