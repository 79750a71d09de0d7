#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pir {

// Compensated (Kahan) accumulator. The solver compares objective decrements
// near 1e-9 on sums of ~1e5 magnitude; naive summation noise would swamp that.
struct KahanSum {
    double s = 0.0;
    double c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double value() const { return s; }
};

struct ImageGrid {
    int h = 0, w = 0;
    std::vector<double> v;  // row-major

    ImageGrid() = default;
    ImageGrid(int h_, int w_, double fill = 0.0) : h(h_), w(w_), v(static_cast<size_t>(h_) * w_, fill) {
        if (h_ <= 0 || w_ <= 0) throw std::invalid_argument("ImageGrid: dimensions must be positive");
    }
    int n() const { return h * w; }
    double& at(int i, int j) { return v[static_cast<size_t>(i) * w + j]; }
    double at(int i, int j) const { return v[static_cast<size_t>(i) * w + j]; }
    bool same_shape(const ImageGrid& o) const { return h == o.h && w == o.w; }
};

struct CountGrid {
    int h = 0, w = 0;
    std::vector<std::int64_t> v;

    CountGrid() = default;
    CountGrid(int h_, int w_, std::int64_t fill = 0) : h(h_), w(w_), v(static_cast<size_t>(h_) * w_, fill) {
        if (h_ <= 0 || w_ <= 0) throw std::invalid_argument("CountGrid: dimensions must be positive");
    }
    int n() const { return h * w; }
    std::int64_t& at(int i, int j) { return v[static_cast<size_t>(i) * w + j]; }
    std::int64_t at(int i, int j) const { return v[static_cast<size_t>(i) * w + j]; }
};

ImageGrid to_image(const CountGrid& g);

struct Band {
    std::string id;
    ImageGrid img;
};

// Coefficient field over a (possibly redundant) frame, plus an optional scalar
// modelling a constant background level through the augmented operator.
struct CoeffField {
    std::vector<Band> bands;
    std::optional<double> background;

    bool same_structure(const CoeffField& o) const;
    const ImageGrid& band(const std::string& id) const;
};

double inner_product(const ImageGrid& a, const ImageGrid& b);
double coeff_inner_product(const CoeffField& a, const CoeffField& b);
double lp_norm_p(const CoeffField& c, double p);

double norm_sq(const ImageGrid& a);
double norm(const ImageGrid& a);
double coeff_norm_sq(const CoeffField& a);

// a + t*b, matching structures
CoeffField coeff_axpy(const CoeffField& a, const CoeffField& b, double t);

}  // namespace pir
