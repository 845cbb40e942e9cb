#include "swipt/topology.hpp"

#include <cmath>
#include <ostream>

namespace swipt {

double SystemGeometry::shadowing_std_db() const { return std::sqrt(shadowing_variance); }

void SystemGeometry::validate() const {
    require(area_side_D > 0, "geometry: area side must be positive");
    require(reference_distance_d0 > 0, "geometry: reference distance must be positive");
    require(pathloss_exponent_nu > 0, "geometry: path-loss exponent must be positive");
    require(shadowing_variance >= 0, "geometry: shadowing variance must be non-negative");
}

void LargeScaleGains::validate() const {
    require(zeta.rows() >= 1 && zeta.cols() >= 1, "gains: empty matrix");
    require(zeta.allFinite() && (zeta.array() > 0).all(), "gains: entries must be positive and finite");
}

namespace {

int perfect_sqrt(int m) {
    int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
    return r * r == m ? r : 0;
}

Eigen::MatrixX2d uniform_points(int n, double side, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, side);
    Eigen::MatrixX2d p(n, 2);
    for (int i = 0; i < n; ++i) {
        p(i, 0) = u(rng);
        p(i, 1) = u(rng);
    }
    return p;
}

}  // namespace

Placement place_nodes(const SystemGeometry& geometry, int m, int k, std::uint64_t rng_seed) {
    geometry.validate();
    require(m >= 1 && k >= 1, "place_nodes: m and k must be positive");
    const double D = geometry.area_side_D;
    Placement p;
    Rng ap_rng = make_rng(rng_seed, 1);
    Rng user_rng = make_rng(rng_seed, 2);
    if (int side = perfect_sqrt(m)) {
        p.ap_positions.resize(m, 2);
        const double step = D / side;
        for (int i = 0; i < side; ++i)
            for (int j = 0; j < side; ++j) {
                p.ap_positions(i * side + j, 0) = (i + 0.5) * step;
                p.ap_positions(i * side + j, 1) = (j + 0.5) * step;
            }
    } else {
        p.ap_positions = uniform_points(m, D, ap_rng);
    }
    p.user_positions = uniform_points(k, D, user_rng);
    return p;
}

Placement place_colocated(const SystemGeometry& geometry, int m, int k, std::uint64_t rng_seed) {
    Placement p = place_nodes(geometry, m, k, rng_seed);
    p.ap_positions.setConstant(geometry.area_side_D / 2);
    return p;
}

Mat distances(const SystemGeometry& geometry, const Placement& placement) {
    const int M = placement.m(), K = placement.k();
    const double D = geometry.area_side_D;
    Mat d(M, K);
    for (int mi = 0; mi < M; ++mi)
        for (int k = 0; k < K; ++k) {
            double dx = std::abs(placement.ap_positions(mi, 0) - placement.user_positions(k, 0));
            double dy = std::abs(placement.ap_positions(mi, 1) - placement.user_positions(k, 1));
            if (geometry.wrap_around) {
                dx = std::min(dx, D - dx);
                dy = std::min(dy, D - dy);
            }
            d(mi, k) = std::hypot(dx, dy);
        }
    return d;
}

double path_loss(const SystemGeometry& geometry, double d) {
    const double d0 = geometry.reference_distance_d0;
    return std::pow(d0 / std::max(d, d0), geometry.pathloss_exponent_nu);
}

LargeScaleGains large_scale_gains(const SystemGeometry& geometry, const Placement& placement,
                                  std::uint64_t rng_seed) {
    geometry.validate();
    require(placement.m() >= 1 && placement.k() >= 1, "large_scale_gains: empty placement");
    Mat d = distances(geometry, placement);
    Rng rng = make_rng(rng_seed, 3);
    std::normal_distribution<double> phi(0.0, geometry.shadowing_std_db());
    LargeScaleGains g;
    g.zeta.resize(d.rows(), d.cols());
    for (int k = 0; k < d.cols(); ++k)
        for (int mi = 0; mi < d.rows(); ++mi) {
            double shadow_db = geometry.shadowing_variance > 0 ? phi(rng) : 0.0;
            g.zeta(mi, k) = path_loss(geometry, d(mi, k)) * std::pow(10.0, shadow_db / 10.0);
        }
    return g;
}

void write_placement_csv(std::ostream& os, const Placement& placement) {
    os << "kind,id,x_m,y_m\n";
    os.precision(17);
    for (int i = 0; i < placement.m(); ++i)
        os << "ap," << i << ',' << placement.ap_positions(i, 0) << ',' << placement.ap_positions(i, 1) << '\n';
    for (int i = 0; i < placement.k(); ++i)
        os << "user," << i << ',' << placement.user_positions(i, 0) << ',' << placement.user_positions(i, 1)
           << '\n';
}

void write_gains_csv(std::ostream& os, const LargeScaleGains& gains) {
    os << "m,k,zeta\n";
    os.precision(17);
    for (int m = 0; m < gains.m(); ++m)
        for (int k = 0; k < gains.k(); ++k) os << m << ',' << k << ',' << gains.zeta(m, k) << '\n';
}

}  // namespace swipt
