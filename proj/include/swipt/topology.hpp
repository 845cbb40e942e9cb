#pragma once

#include "swipt/common.hpp"

#include <iosfwd>

namespace swipt {

struct SystemGeometry {
    double area_side_D = 300.0;           // m
    double reference_distance_d0 = 1.0;   // m
    double pathloss_exponent_nu = 3.4;
    double shadowing_variance = 64.0;     // dB^2, i.e. sigma_sh = 8 dB
    bool wrap_around = false;

    double shadowing_std_db() const;
    void validate() const;
};

// Rows are 2-D coordinates in metres.
struct Placement {
    Eigen::MatrixX2d ap_positions;
    Eigen::MatrixX2d user_positions;

    int m() const { return static_cast<int>(ap_positions.rows()); }
    int k() const { return static_cast<int>(user_positions.rows()); }
};

struct LargeScaleGains {
    Mat zeta;  // M x K, linear power gains, noise-normalized link budget

    int m() const { return static_cast<int>(zeta.rows()); }
    int k() const { return static_cast<int>(zeta.cols()); }
    void validate() const;
};

// Regular sqrt(M) x sqrt(M) grid when M is a perfect square, else uniform.
Placement place_nodes(const SystemGeometry& geometry, int m, int k, std::uint64_t rng_seed);

// Every antenna at the centre of the area; users as in place_nodes.
Placement place_colocated(const SystemGeometry& geometry, int m, int k, std::uint64_t rng_seed);

// M x K distance matrix, torus metric when wrap_around is set.
Mat distances(const SystemGeometry& geometry, const Placement& placement);

LargeScaleGains large_scale_gains(const SystemGeometry& geometry, const Placement& placement,
                                  std::uint64_t rng_seed);

// Deterministic path loss (d0 / max(d, d0))^nu without shadowing.
double path_loss(const SystemGeometry& geometry, double d);

void write_placement_csv(std::ostream& os, const Placement& placement);
void write_gains_csv(std::ostream& os, const LargeScaleGains& gains);

}  // namespace swipt
