#include "torusns/convolution_reference.hpp"

namespace torusns {

namespace {

struct ModeVec {
    WaveVector k;
    Complex v1, v2;  // velocity component coefficients of e^{ik.x}
};

// Expands a_k into per-component coefficients v_k = a_k (k2,-k1)/(2pi|k|).
std::vector<ModeVec> component_coeffs(const SpectralField& u) {
    std::vector<ModeVec> out;
    out.reserve(u.truncation().mode_count());
    u.for_each_mode([&](WaveVector k, Complex a) {
        const double inv = 1.0 / (2.0 * M_PI * k.norm());
        out.push_back({k, a * (k.k2 * inv), a * (-k.k1 * inv)});
    });
    return out;
}

}  // namespace

SpectralField advection_direct(const SpectralField& u, const SpectralField& v) {
    if (!u.same_truncation(v)) throw std::domain_error("advection_direct: truncation mismatch");
    const auto us = component_coeffs(u);
    const auto vs = component_coeffs(v);
    const int n = u.truncation().n_max;
    const int side = u.truncation().side();
    std::vector<Complex> w1(static_cast<std::size_t>(side) * side);
    std::vector<Complex> w2(w1.size());
    for (const ModeVec& p : us) {
        for (const ModeVec& q : vs) {
            const int k1 = p.k.k1 + q.k.k1;
            const int k2 = p.k.k2 + q.k.k2;
            if (std::abs(k1) > n || std::abs(k2) > n) continue;
            if (k1 == 0 && k2 == 0) continue;
            // (u.grad)v term: i (u_p . q) v_q at mode p + q.
            const Complex dot = Complex(0.0, 1.0) *
                                (p.v1 * static_cast<double>(q.k.k1) + p.v2 * static_cast<double>(q.k.k2));
            const std::size_t s = static_cast<std::size_t>(k1 + n) * side + (k2 + n);
            w1[s] += dot * q.v1;
            w2[s] += dot * q.v2;
        }
    }
    SpectralField out(u.truncation());
    out.for_each_mode([&](WaveVector k, Complex& a) {
        const std::size_t s = static_cast<std::size_t>(k.k1 + n) * side + (k.k2 + n);
        a = 2.0 * M_PI * (w1[s] * static_cast<double>(k.k2) - w2[s] * static_cast<double>(k.k1)) /
            k.norm();
    });
    return out;
}

SpectralField nonlinearity_direct(const SpectralField& u) { return advection_direct(u, u); }

double b_form_direct(const SpectralField& u, const SpectralField& v, const SpectralField& w) {
    if (!u.same_truncation(v) || !u.same_truncation(w))
        throw std::domain_error("b_form_direct: truncation mismatch");
    const auto us = component_coeffs(u);
    const auto vs = component_coeffs(v);
    const int n = u.truncation().n_max;
    Complex acc = 0.0;
    for (const ModeVec& p : us) {
        for (const ModeVec& q : vs) {
            const WaveVector r{-(p.k.k1 + q.k.k1), -(p.k.k2 + q.k.k2)};
            if (r.is_zero() || std::abs(r.k1) > n || std::abs(r.k2) > n) continue;
            const double inv = 1.0 / (2.0 * M_PI * r.norm());
            const Complex a_r = w.at(r);
            const Complex r1 = a_r * (r.k2 * inv);
            const Complex r2 = a_r * (-r.k1 * inv);
            const Complex dot_pq = Complex(0.0, 1.0) *
                                   (p.v1 * static_cast<double>(q.k.k1) +
                                    p.v2 * static_cast<double>(q.k.k2));
            acc += dot_pq * (q.v1 * r1 + q.v2 * r2);
        }
    }
    // Integral of e^{i(p+q+r).x} over the torus contributes (2pi)^2 on p+q+r = 0.
    return (4.0 * M_PI * M_PI) * acc.real();
}

}  // namespace torusns
