#include "torusns/transform.hpp"

#include <fftw3.h>

#include <mutex>

namespace torusns {

namespace {
// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct FourierWorkspace::Impl {
    int N = 0;
    fftw_complex* scratch = nullptr;
    fftw_plan fwd = nullptr;  // e^{-ik.x} (analysis, unnormalized)
    fftw_plan bwd = nullptr;  // e^{+ik.x} (synthesis)

    // Named real grids reused across calls.
    std::vector<double> g_u1, g_u2, g_w, g_a, g_b, g_c, g_d, g_e, g_f;

    explicit Impl(int grid) : N(grid) {
        const std::size_t n2 = static_cast<std::size_t>(N) * N;
        scratch = fftw_alloc_complex(n2);
        {
            std::lock_guard<std::mutex> lock(plan_mutex());
            fwd = fftw_plan_dft_2d(N, N, scratch, scratch, FFTW_FORWARD, FFTW_ESTIMATE);
            bwd = fftw_plan_dft_2d(N, N, scratch, scratch, FFTW_BACKWARD, FFTW_ESTIMATE);
        }
        for (auto* g : {&g_u1, &g_u2, &g_w, &g_a, &g_b, &g_c, &g_d, &g_e, &g_f}) g->assign(n2, 0.0);
    }

    ~Impl() {
        std::lock_guard<std::mutex> lock(plan_mutex());
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        fftw_free(scratch);
    }

    std::size_t wrap(int k1, int k2) const {
        const int i = k1 >= 0 ? k1 : k1 + N;
        const int j = k2 >= 0 ? k2 : k2 + N;
        return static_cast<std::size_t>(i) * N + j;
    }

    void clear_scratch() {
        const std::size_t n2 = static_cast<std::size_t>(N) * N;
        for (std::size_t i = 0; i < n2; ++i) scratch[i][0] = scratch[i][1] = 0.0;
    }

    // Synthesizes sum_k coef(k) e^{ik.x} into `out`; coef supplies the per-mode
    // complex amplitude for retained modes only.
    template <class CoefFn>
    void synthesize(const SpectralField& u, CoefFn&& coef, std::vector<double>& out) {
        clear_scratch();
        u.for_each_mode([&](WaveVector k, Complex a) {
            const Complex c = coef(k, a);
            const std::size_t s = wrap(k.k1, k.k2);
            scratch[s][0] = c.real();
            scratch[s][1] = c.imag();
        });
        fftw_execute(bwd);
        const std::size_t n2 = static_cast<std::size_t>(N) * N;
        for (std::size_t i = 0; i < n2; ++i) out[i] = scratch[i][0];
    }

    // Forward transform of a real grid; reader receives the normalized
    // coefficient of e^{ik.x} for each retained mode.
    template <class ReadFn>
    void analyze(const std::vector<double>& in, int n_max, ReadFn&& read) {
        const std::size_t n2 = static_cast<std::size_t>(N) * N;
        for (std::size_t i = 0; i < n2; ++i) {
            scratch[i][0] = in[i];
            scratch[i][1] = 0.0;
        }
        fftw_execute(fwd);
        const double inv = 1.0 / static_cast<double>(n2);
        for (int k1 = -n_max; k1 <= n_max; ++k1)
            for (int k2 = -n_max; k2 <= n_max; ++k2) {
                if (k1 == 0 && k2 == 0) continue;
                const std::size_t s = wrap(k1, k2);
                read(WaveVector{k1, k2}, Complex(scratch[s][0], scratch[s][1]) * inv);
            }
    }

    // Velocity component coefficients: u_j(x) = sum_k c_j(k) e^{ik.x} with
    // c1 = a_k k2/(2pi|k|), c2 = -a_k k1/(2pi|k|).
    static Complex c1(WaveVector k, Complex a) { return a * (k.k2 / (2.0 * M_PI * k.norm())); }
    static Complex c2(WaveVector k, Complex a) { return a * (-k.k1 / (2.0 * M_PI * k.norm())); }

    // Projection of per-component coefficients back onto e_k.
    static Complex project(WaveVector k, Complex f1, Complex f2) {
        return 2.0 * M_PI * (f1 * static_cast<double>(k.k2) - f2 * static_cast<double>(k.k1)) /
               k.norm();
    }
};

FourierWorkspace::FourierWorkspace(TruncationParams trunc) : trunc_(trunc) {
    trunc_.validate();
    impl_ = std::make_unique<Impl>(trunc.grid_size);
}

FourierWorkspace::~FourierWorkspace() = default;

GridField FourierWorkspace::to_grid(const SpectralField& u) {
    GridField g(impl_->N);
    impl_->synthesize(u, Impl::c1, g.u1);
    impl_->synthesize(u, Impl::c2, g.u2);
    return g;
}

SpectralField FourierWorkspace::to_spectral(const GridField& f) {
    if (f.grid_size != impl_->N) throw std::domain_error("to_spectral: grid size mismatch");
    SpectralField out(trunc_);
    std::vector<Complex> f1(static_cast<std::size_t>(trunc_.side()) * trunc_.side());
    impl_->analyze(f.u1, trunc_.n_max, [&](WaveVector k, Complex c) { f1[out.index(k)] = c; });
    impl_->analyze(f.u2, trunc_.n_max, [&](WaveVector k, Complex c) {
        out.set(k, Impl::project(k, f1[out.index(k)], c));
    });
    return out;
}

SpectralField FourierWorkspace::nonlinearity(const SpectralField& u) {
    if (!(u.truncation() == trunc_)) throw std::domain_error("nonlinearity: truncation mismatch");
    auto& im = *impl_;
    im.synthesize(u, Impl::c1, im.g_u1);
    im.synthesize(u, Impl::c2, im.g_u2);
    // Vorticity coefficient: omega_k = -i |k| a_k / (2pi).
    im.synthesize(u, [](WaveVector k, Complex a) { return Complex(0.0, -k.norm() / (2.0 * M_PI)) * a; },
                  im.g_w);
    // (u.grad)u = grad(|u|^2/2) + omega u^perp; the gradient part is Leray-orthogonal.
    const std::size_t n2 = im.g_w.size();
    for (std::size_t i = 0; i < n2; ++i) {
        im.g_a[i] = -im.g_w[i] * im.g_u2[i];
        im.g_b[i] = im.g_w[i] * im.g_u1[i];
    }
    SpectralField out(trunc_);
    std::vector<Complex> h1(static_cast<std::size_t>(trunc_.side()) * trunc_.side());
    im.analyze(im.g_a, trunc_.n_max, [&](WaveVector k, Complex c) { h1[out.index(k)] = c; });
    im.analyze(im.g_b, trunc_.n_max, [&](WaveVector k, Complex c) {
        out.set(k, Impl::project(k, h1[out.index(k)], c));
    });
    return out;
}

SpectralField FourierWorkspace::advection(const SpectralField& u, const SpectralField& v) {
    if (!u.same_truncation(v) || !(u.truncation() == trunc_))
        throw std::domain_error("advection: truncation mismatch");
    auto& im = *impl_;
    im.synthesize(u, Impl::c1, im.g_u1);
    im.synthesize(u, Impl::c2, im.g_u2);
    auto deriv = [](int axis, auto base) {
        return [axis, base](WaveVector k, Complex a) {
            return Complex(0.0, axis == 0 ? k.k1 : k.k2) * base(k, a);
        };
    };
    im.synthesize(v, deriv(0, Impl::c1), im.g_a);  // d v1 / dx1
    im.synthesize(v, deriv(1, Impl::c1), im.g_b);  // d v1 / dx2
    im.synthesize(v, deriv(0, Impl::c2), im.g_c);  // d v2 / dx1
    im.synthesize(v, deriv(1, Impl::c2), im.g_d);  // d v2 / dx2
    const std::size_t n2 = im.g_a.size();
    for (std::size_t i = 0; i < n2; ++i) {
        const double a1 = im.g_u1[i], a2 = im.g_u2[i];
        im.g_e[i] = a1 * im.g_a[i] + a2 * im.g_b[i];
        im.g_f[i] = a1 * im.g_c[i] + a2 * im.g_d[i];
    }
    SpectralField out(trunc_);
    std::vector<Complex> h1(static_cast<std::size_t>(trunc_.side()) * trunc_.side());
    im.analyze(im.g_e, trunc_.n_max, [&](WaveVector k, Complex c) { h1[out.index(k)] = c; });
    im.analyze(im.g_f, trunc_.n_max, [&](WaveVector k, Complex c) {
        out.set(k, Impl::project(k, h1[out.index(k)], c));
    });
    return out;
}

SpectralField FourierWorkspace::nonlinearity_jacobian_adjoint(const SpectralField& u,
                                                              const SpectralField& h) {
    if (!u.same_truncation(h) || !(u.truncation() == trunc_))
        throw std::domain_error("jacobian_adjoint: truncation mismatch");
    auto& im = *impl_;
    auto deriv = [](int axis, auto base) {
        return [axis, base](WaveVector k, Complex a) {
            return Complex(0.0, axis == 0 ? k.k1 : k.k2) * base(k, a);
        };
    };
    im.synthesize(h, Impl::c1, im.g_u1);  // h1
    im.synthesize(h, Impl::c2, im.g_u2);  // h2
    im.synthesize(u, deriv(0, Impl::c1), im.g_a);  // d u1/dx1
    im.synthesize(u, deriv(1, Impl::c1), im.g_b);  // d u1/dx2
    im.synthesize(u, deriv(0, Impl::c2), im.g_c);  // d u2/dx1
    im.synthesize(u, deriv(1, Impl::c2), im.g_d);  // d u2/dx2
    const std::size_t n2 = im.g_a.size();
    // (grad u)^T h, component i = sum_j h_j d u_j / dx_i
    for (std::size_t i = 0; i < n2; ++i) {
        im.g_e[i] = im.g_u1[i] * im.g_a[i] + im.g_u2[i] * im.g_c[i];
        im.g_f[i] = im.g_u1[i] * im.g_b[i] + im.g_u2[i] * im.g_d[i];
    }
    im.synthesize(h, deriv(0, Impl::c1), im.g_a);  // d h1/dx1
    im.synthesize(h, deriv(1, Impl::c1), im.g_b);  // d h1/dx2
    im.synthesize(h, deriv(0, Impl::c2), im.g_c);  // d h2/dx1
    im.synthesize(h, deriv(1, Impl::c2), im.g_d);  // d h2/dx2
    im.synthesize(u, Impl::c1, im.g_u1);
    im.synthesize(u, Impl::c2, im.g_u2);
    for (std::size_t i = 0; i < n2; ++i) {
        im.g_e[i] -= im.g_u1[i] * im.g_a[i] + im.g_u2[i] * im.g_b[i];
        im.g_f[i] -= im.g_u1[i] * im.g_c[i] + im.g_u2[i] * im.g_d[i];
    }
    SpectralField out(trunc_);
    std::vector<Complex> h1(static_cast<std::size_t>(trunc_.side()) * trunc_.side());
    im.analyze(im.g_e, trunc_.n_max, [&](WaveVector k, Complex c) { h1[out.index(k)] = c; });
    im.analyze(im.g_f, trunc_.n_max, [&](WaveVector k, Complex c) {
        out.set(k, Impl::project(k, h1[out.index(k)], c));
    });
    return out;
}

SpectralField leray_project(const GridField& f, TruncationParams trunc) {
    FourierWorkspace ws(TruncationParams{trunc.n_max, f.grid_size});
    return ws.to_spectral(f);
}

double b_form(const SpectralField& u, const SpectralField& v, const SpectralField& w,
              FourierWorkspace& ws) {
    if (!u.same_truncation(v) || !u.same_truncation(w))
        throw std::domain_error("b_form: truncation mismatch");
    return inner_h(ws.advection(u, v), w);
}

double grid_lp_norm(const GridField& f, double p) {
    const double cell = std::pow(2.0 * M_PI / f.grid_size, 2);
    double s = 0.0;
    for (std::size_t i = 0; i < f.u1.size(); ++i) {
        const double mag2 = f.u1[i] * f.u1[i] + f.u2[i] * f.u2[i];
        s += std::pow(mag2, p / 2.0);
    }
    return std::pow(cell * s, 1.0 / p);
}

}  // namespace torusns
