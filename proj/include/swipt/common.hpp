#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace swipt {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using cplx = std::complex<double>;
using Rng = std::mt19937_64;

struct unsupported_configuration : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct protocol_violation : std::logic_error {
    using std::logic_error::logic_error;
};

struct numerical_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// SplitMix64 finalizer; turns (seed, stream) into a well-mixed child seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    return Rng(mix_seed(seed, stream));
}

// Circularly-symmetric CN(0, 1): two real normals scaled by 1/sqrt(2).
inline cplx complex_normal(Rng& rng) {
    std::normal_distribution<double> n(0.0, M_SQRT1_2);
    double re = n(rng);
    double im = n(rng);
    return {re, im};
}

inline void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace swipt
