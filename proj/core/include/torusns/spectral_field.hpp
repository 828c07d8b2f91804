#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace torusns {

using Complex = std::complex<double>;

/// Nonzero lattice wavevector k = (k1,k2) on Z^2 \ {0}.
struct WaveVector {
    int k1 = 0;
    int k2 = 0;

    int norm2() const { return k1 * k1 + k2 * k2; }
    double norm() const { return std::sqrt(static_cast<double>(norm2())); }
    WaveVector negated() const { return {-k1, -k2}; }
    bool is_zero() const { return k1 == 0 && k2 == 0; }

    /// Representative of the conjugate pair {k,-k}: k1 > 0, or k1 == 0 and k2 > 0.
    bool is_half_lattice() const { return k1 > 0 || (k1 == 0 && k2 > 0); }

    friend bool operator==(const WaveVector& a, const WaveVector& b) {
        return a.k1 == b.k1 && a.k2 == b.k2;
    }
};

/// Galerkin truncation: retain |k|_inf <= n_max; grid_size physical points per axis.
struct TruncationParams {
    int n_max = 0;
    int grid_size = 0;

    /// Smallest even grid with exact dealiasing of quadratic products (> 3*n_max).
    static int default_grid_size(int n_max) {
        int n = 3 * n_max + 2;
        return n % 2 == 0 ? n : n + 1;
    }

    static TruncationParams with_default_grid(int n_max) {
        return {n_max, default_grid_size(n_max)};
    }

    int mode_count() const { return (2 * n_max + 1) * (2 * n_max + 1) - 1; }
    int side() const { return 2 * n_max + 1; }

    void validate() const {
        if (n_max < 1) throw std::invalid_argument("truncation: n_max must be >= 1");
        if (grid_size < 3 * n_max)
            throw std::invalid_argument("truncation: grid_size must be >= 3*n_max for dealiasing");
    }

    friend bool operator==(const TruncationParams& a, const TruncationParams& b) {
        return a.n_max == b.n_max && a.grid_size == b.grid_size;
    }
};

/// Divergence-free mean-zero velocity field as complex coefficients a_k on the
/// truncated lattice, u(x) = sum_k a_k e_k(x).  Both a_k and a_{-k} are stored;
/// real-valued fields satisfy a_{-k} = -conj(a_k).
class SpectralField {
  public:
    SpectralField() = default;

    explicit SpectralField(TruncationParams trunc)
        : trunc_(trunc), coef_(static_cast<std::size_t>(trunc.side()) * trunc.side()) {
        trunc_.validate();
    }

    const TruncationParams& truncation() const { return trunc_; }
    int n_max() const { return trunc_.n_max; }

    bool same_truncation(const SpectralField& o) const { return trunc_ == o.trunc_; }

    /// Linear index of mode k; stable across runs (used as RNG slot).
    int index(WaveVector k) const {
        assert(std::abs(k.k1) <= trunc_.n_max && std::abs(k.k2) <= trunc_.n_max);
        return (k.k1 + trunc_.n_max) * trunc_.side() + (k.k2 + trunc_.n_max);
    }

    Complex at(WaveVector k) const { return k.is_zero() ? Complex{} : coef_[index(k)]; }

    void set(WaveVector k, Complex a) {
        if (k.is_zero()) throw std::domain_error("spectral field has no k = 0 mode");
        coef_[index(k)] = a;
    }

    /// Sets a_k and the partner a_{-k} = -conj(a_k) in one call.
    void set_pair(WaveVector k, Complex a) {
        set(k, a);
        set(k.negated(), -std::conj(a));
    }

    template <class F>
    void for_each_mode(F&& f) const {
        const int n = trunc_.n_max;
        for (int k1 = -n; k1 <= n; ++k1)
            for (int k2 = -n; k2 <= n; ++k2) {
                if (k1 == 0 && k2 == 0) continue;
                f(WaveVector{k1, k2}, coef_[(k1 + n) * trunc_.side() + (k2 + n)]);
            }
    }

    template <class F>
    void for_each_mode(F&& f) {
        const int n = trunc_.n_max;
        for (int k1 = -n; k1 <= n; ++k1)
            for (int k2 = -n; k2 <= n; ++k2) {
                if (k1 == 0 && k2 == 0) continue;
                f(WaveVector{k1, k2}, coef_[(k1 + n) * trunc_.side() + (k2 + n)]);
            }
    }

    /// max_k |a_{-k} + conj(a_k)|; zero for real-valued fields.
    double reality_defect() const {
        double worst = 0.0;
        for_each_mode([&](WaveVector k, Complex a) {
            worst = std::max(worst, std::abs(at(k.negated()) + std::conj(a)));
        });
        return worst;
    }

    /// Projects onto the reality constraint by symmetrizing conjugate pairs.
    void enforce_reality() {
        for_each_mode([&](WaveVector k, Complex& a) {
            if (!k.is_half_lattice()) return;
            const Complex b = at(k.negated());
            const Complex avg = 0.5 * (a - std::conj(b));
            a = avg;
            coef_[index(k.negated())] = -std::conj(avg);
        });
    }

    bool finite() const {
        for (const Complex& a : coef_)
            if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) return false;
        return true;
    }

    SpectralField& operator+=(const SpectralField& o) {
        check_same(o);
        for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] += o.coef_[i];
        return *this;
    }
    SpectralField& operator-=(const SpectralField& o) {
        check_same(o);
        for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] -= o.coef_[i];
        return *this;
    }
    SpectralField& operator*=(double c) {
        for (Complex& a : coef_) a *= c;
        return *this;
    }

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double c, SpectralField a) { return a *= c; }
    friend SpectralField operator*(SpectralField a, double c) { return a *= c; }

    /// this += c * o, without temporaries.
    void axpy(double c, const SpectralField& o) {
        check_same(o);
        for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] += c * o.coef_[i];
    }

    const std::vector<Complex>& raw() const { return coef_; }
    std::vector<Complex>& raw() { return coef_; }

  private:
    void check_same(const SpectralField& o) const {
        if (!same_truncation(o)) throw std::domain_error("spectral fields have mismatched truncation");
    }

    TruncationParams trunc_;
    std::vector<Complex> coef_;
};

/// Velocity samples on the uniform grid x_ij = 2*pi*(i,j)/grid_size.
struct GridField {
    int grid_size = 0;
    std::vector<double> u1;
    std::vector<double> u2;

    GridField() = default;
    explicit GridField(int n)
        : grid_size(n),
          u1(static_cast<std::size_t>(n) * n),
          u2(static_cast<std::size_t>(n) * n) {}

    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(i) * grid_size + j;
    }
};

/// e_k(x) = (1/2pi) (k2,-k1)/|k| e^{i x.k}.
inline std::array<Complex, 2> basis_eval(WaveVector k, std::array<double, 2> x) {
    if (k.is_zero()) throw std::domain_error("basis_eval: zero wavevector");
    const double inv = 1.0 / (2.0 * M_PI * k.norm());
    const Complex phase = std::exp(Complex(0.0, x[0] * k.k1 + x[1] * k.k2));
    return {inv * k.k2 * phase, -inv * k.k1 * phase};
}

/// Coefficient at k multiplied by |k|^{2r} (A^r, diagonal in the e_k basis).
inline SpectralField stokes_apply(const SpectralField& u, double power) {
    SpectralField out = u;
    out.for_each_mode([&](WaveVector k, Complex& a) {
        a *= std::pow(static_cast<double>(k.norm2()), power);
    });
    return out;
}

/// V^r norm: sqrt(sum_k |k|^{2r} |a_k|^2).  r = 0 is the H (= L^2) norm.
inline double sobolev_norm(const SpectralField& u, double r) {
    double s = 0.0;
    if (r == 0.0) {
        for (const Complex& a : u.raw()) s += std::norm(a);
    } else {
        u.for_each_mode([&](WaveVector k, Complex a) {
            s += std::pow(static_cast<double>(k.norm2()), r) * std::norm(a);
        });
    }
    return std::sqrt(s);
}

inline double norm_h(const SpectralField& u) { return sobolev_norm(u, 0.0); }
inline double norm_v(const SpectralField& u) { return sobolev_norm(u, 1.0); }

/// H inner product of two real-valued fields: sum_k a_k conj(b_k) (real part).
inline double inner_h(const SpectralField& u, const SpectralField& v) {
    if (!u.same_truncation(v)) throw std::domain_error("inner_h: mismatched truncation");
    double s = 0.0;
    const auto& a = u.raw();
    const auto& b = v.raw();
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    return s;
}

/// <u, A v>_H = sum_k |k|^2 a_k conj(b_k); the V inner product.
inline double inner_v(const SpectralField& u, const SpectralField& v) {
    if (!u.same_truncation(v)) throw std::domain_error("inner_v: mismatched truncation");
    double s = 0.0;
    u.for_each_mode([&](WaveVector k, Complex a) {
        const Complex b = v.at(k);
        s += k.norm2() * (a.real() * b.real() + a.imag() * b.imag());
    });
    return s;
}

}  // namespace torusns
