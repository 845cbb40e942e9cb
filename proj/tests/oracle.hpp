#pragma once

// Independent Monte-Carlo simulation of the signal models. Nothing here calls
// the library's channel, estimation or rate code; it only shares the Eigen types.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using cplx = std::complex<double>;

struct Running {
    double n = 0, mean = 0, m2 = 0;
    void add(double x) {
        n += 1;
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    double se() const { return n > 1 ? std::sqrt(m2 / (n - 1) / n) : 0.0; }
};

struct Instance {
    Mat zeta;  // M x K
    Mat eta;   // M x K
    double tau_p = 2, pp = 1;
    int m() const { return static_cast<int>(zeta.rows()); }
    int k() const { return static_cast<int>(zeta.cols()); }
    // MMSE coefficient for the projected pilot y = sqrt(tau_p pp) h + n.
    Mat c() const {
        const double tp = tau_p * pp;
        return (std::sqrt(tp) * zeta.array() / (tp * zeta.array() + 1.0)).matrix();
    }
    Mat rho() const { return (std::sqrt(tau_p * pp) * zeta.array() * c().array()).matrix(); }
};

class Sim {
public:
    explicit Sim(std::uint64_t seed) : rng_(seed) {}

    cplx cn() {
        std::normal_distribution<double> n(0.0, std::sqrt(0.5));
        const double re = n(rng_);
        return {re, n(rng_)};
    }

    // One draw of (h, h_hat) from the uplink training model.
    void draw(const Instance& in, CMat& h, CMat& h_hat) {
        const int M = in.m(), K = in.k();
        const double s = std::sqrt(in.tau_p * in.pp);
        const Mat c = in.c();
        h.resize(M, K);
        h_hat.resize(M, K);
        for (int mm = 0; mm < M; ++mm)
            for (int k = 0; k < K; ++k) {
                h(mm, k) = std::sqrt(in.zeta(mm, k)) * cn();
                h_hat(mm, k) = c(mm, k) * (s * h(mm, k) + cn());
            }
    }

    // a_ki = sum_m sqrt(eta_mi) h_mk conj(h_hat_mi)
    static CMat effective(const Instance& in, const CMat& h, const CMat& h_hat) {
        const int M = in.m(), K = in.k();
        CMat a = CMat::Zero(K, K);
        for (int k = 0; k < K; ++k)
            for (int i = 0; i < K; ++i)
                for (int mm = 0; mm < M; ++mm) a(k, i) += std::sqrt(in.eta(mm, i)) * h(mm, k) * std::conj(h_hat(mm, i));
        return a;
    }

    std::mt19937_64& rng() { return rng_; }

private:
    std::mt19937_64 rng_;
};

// Interval for a ratio num/den from 3-sigma intervals of each part.
struct Band {
    double lo = 0, hi = 0;
    bool contains(double v) const { return v >= lo && v <= hi; }
};

inline Band ratio_band(double num, double num_se, double den, double den_se, double z = 3.0) {
    const double nl = std::max(0.0, num - z * num_se), nh = num + z * num_se;
    const double dl = den - z * den_se, dh = den + z * den_se;
    return {nl / dh, dl > 0 ? nh / dl : INFINITY};
}

// Received power P_k = P_d |sum_i a_ki q_i|^2 with unit-modulus symbols.
inline std::vector<Running> received_power(const Instance& in, double p_d, int trials, std::uint64_t seed) {
    Sim sim(seed);
    std::uniform_real_distribution<double> ph(0.0, 2 * M_PI);
    std::vector<Running> out(in.k());
    CMat h, hh;
    for (int t = 0; t < trials; ++t) {
        sim.draw(in, h, hh);
        const CMat a = Sim::effective(in, h, hh);
        Eigen::VectorXcd q(in.k());
        for (int i = 0; i < in.k(); ++i) q(i) = std::polar(1.0, ph(sim.rng()));
        const Eigen::VectorXcd r = a * q;
        for (int k = 0; k < in.k(); ++k) out[k].add(p_d * std::norm(r(k)));
    }
    return out;
}

// Downlink SINR band from simulated E[a_kk], Var[a_kk], E|a_ki|^2.
inline std::vector<Band> dl_sinr_band(const Instance& in, double p_tilde, int trials, std::uint64_t seed) {
    Sim sim(seed);
    const int K = in.k();
    std::vector<Running> re(K), sq(K), cross(K);
    CMat h, hh;
    for (int t = 0; t < trials; ++t) {
        sim.draw(in, h, hh);
        const CMat a = Sim::effective(in, h, hh);
        for (int k = 0; k < K; ++k) {
            re[k].add(a(k, k).real());
            sq[k].add(std::norm(a(k, k)));
            double c = 0;
            for (int i = 0; i < K; ++i)
                if (i != k) c += std::norm(a(k, i));
            cross[k].add(c);
        }
    }
    std::vector<Band> out(K);
    for (int k = 0; k < K; ++k) {
        const double mu = re[k].mean, mu_se = re[k].se();
        const double num = p_tilde * mu * mu, num_se = p_tilde * 2 * std::abs(mu) * mu_se;
        // Var = E|a|^2 - |E a|^2; errors of the parts add.
        const double var = sq[k].mean - mu * mu;
        const double den = p_tilde * (var + cross[k].mean) + 1.0;
        const double den_se = p_tilde * (sq[k].se() + 2 * std::abs(mu) * mu_se + cross[k].se());
        out[k] = ratio_band(num, num_se, den, den_se);
    }
    return out;
}

// Uplink SINR band for MRC detection r_k = sum_m conj(h_hat_mk) y_m.
inline std::vector<Band> ul_sinr_band(const Instance& in, const Vec& p_u, const Vec& eta_u, int trials,
                                      std::uint64_t seed) {
    Sim sim(seed);
    const int M = in.m(), K = in.k();
    std::vector<Running> re(K), sq(K), cross(K), noise(K);
    CMat h, hh;
    for (int t = 0; t < trials; ++t) {
        sim.draw(in, h, hh);
        for (int k = 0; k < K; ++k) {
            cplx g_kk = 0, nk = 0;
            double c = 0;
            for (int mm = 0; mm < M; ++mm) {
                g_kk += std::conj(hh(mm, k)) * h(mm, k);
                nk += std::conj(hh(mm, k)) * sim.cn();
            }
            for (int i = 0; i < K; ++i) {
                if (i == k) continue;
                cplx g = 0;
                for (int mm = 0; mm < M; ++mm) g += std::conj(hh(mm, k)) * h(mm, i);
                c += p_u(i) * eta_u(i) * std::norm(g);
            }
            re[k].add(g_kk.real());
            sq[k].add(std::norm(g_kk));
            cross[k].add(c);
            noise[k].add(std::norm(nk));
        }
    }
    std::vector<Band> out(K);
    for (int k = 0; k < K; ++k) {
        const double pe = p_u(k) * eta_u(k);
        const double mu = re[k].mean, mu_se = re[k].se();
        const double num = pe * mu * mu, num_se = pe * 2 * std::abs(mu) * mu_se;
        const double den = pe * (sq[k].mean - mu * mu) + cross[k].mean + noise[k].mean;
        const double den_se = pe * (sq[k].se() + 2 * std::abs(mu) * mu_se) + cross[k].se() + noise[k].se();
        out[k] = ratio_band(num, num_se, den, den_se);
    }
    return out;
}

// Beamformed downlink pilots: y_k = sqrt(tau_pd P_pd) a_kk + n, LMMSE estimate of a_kk.
// Band for E[gamma] = P~ E|a_hat|^2 / (P~ E|a - a_hat|^2 + P~ sum_{i!=k} E|a_ki|^2 + 1).
inline std::vector<Band> dl_pilot_sinr_band(const Instance& in, double p_tilde, double tau_pd, double p_pd,
                                            int trials, std::uint64_t seed) {
    Sim sim(seed);
    const int K = in.k();
    const double tp = tau_pd * p_pd, s = std::sqrt(tp);
    const Mat rho = in.rho();
    Vec mean(K), v(K);
    for (int k = 0; k < K; ++k) {
        mean(k) = (in.eta.col(k).array().sqrt() * rho.col(k).array()).sum();
        v(k) = (in.eta.col(k).array() * in.zeta.col(k).array() * rho.col(k).array()).sum();
    }
    std::vector<Running> est(K), err(K), cross(K);
    CMat h, hh;
    for (int t = 0; t < trials; ++t) {
        sim.draw(in, h, hh);
        const CMat a = Sim::effective(in, h, hh);
        for (int k = 0; k < K; ++k) {
            const cplx y = s * a(k, k) + sim.cn();
            const cplx ah = (s * v(k) * y + mean(k)) / (tp * v(k) + 1.0);
            est[k].add(std::norm(ah));
            err[k].add(std::norm(a(k, k) - ah));
            double c = 0;
            for (int i = 0; i < K; ++i)
                if (i != k) c += std::norm(a(k, i));
            cross[k].add(c);
        }
    }
    std::vector<Band> out(K);
    for (int k = 0; k < K; ++k)
        out[k] = ratio_band(p_tilde * est[k].mean, p_tilde * est[k].se(),
                            p_tilde * (err[k].mean + cross[k].mean) + 1.0,
                            p_tilde * (err[k].se() + cross[k].se()));
    return out;
}

// Logistic harvester written out directly.
inline double logistic(double p, double lambda, double mu, double omega) {
    const double raw = lambda / (1 + std::exp(-mu * (p - omega)));
    const double off = 1 / (1 + std::exp(mu * omega));
    return (raw - lambda * off) / (1 - off);
}

}  // namespace oracle
