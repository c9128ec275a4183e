#pragma once

#include "wgstab/grid.hpp"

namespace wgstab {

/// Axial background amplitude u_b(y) = c <y>^{-(1+eps)/2}, <y> = sqrt(1+y^2),
/// together with the potential q_b = u_b''/u_b it annihilates:
/// -u_b'' + q_b u_b = 0 with the closed form
///   q_b(y) = alpha ((alpha+1) y^2 - 1) / (1+y^2)^2,  alpha = (1+eps)/2.
struct AxialBackground {
    double epsilon = 1.0;
    double c = 1.0;

    double alpha() const { return 0.5 * (1.0 + epsilon); }
    double amplitude(double y) const;
    double amplitude_dd(double y) const;
    double potential(double y) const;
};

/// Throws for epsilon <= 0 or c <= 0.
AxialBackground background_profile(double epsilon, double c);

enum class InteriorKind { background, bump };

struct FactoryParams {
    double epsilon = 1.0;
    double c = 1.0;                  // scale of u_b; also the floor constant
    double collar_width = 0.15;      // chi == 1 within this wall distance
    double transition_width = 0.1;   // smoothstep length past the collar
    InteriorKind interior = InteriorKind::background;
    double bump_height = 0.5;        // u_i = u_b (1 + bump_height * g)
    double bump_width = 1.0;
    double bump_potential = 0.5;     // q_i = q_b + bump_potential * g
};

/// Potential/amplitude pair blended from the axial background near the wall
/// and a free interior choice, with its admissibility certificates.
struct AdmissiblePair {
    GridFunction q0;
    GridFunction u0;
    /// (-Delta + q0) u0 with the analytic zero substituted on the collar
    /// (exactly the zero field for an x'-independent pair).
    GridFunction stationary_residual;
    AxialBackground background;
    double collar_width = 0.0;
    double transition_width = 0.0;
    /// Lower-envelope constant: u0 >= upsilon0 <x_n>^{-(1+eps)/2} nodewise.
    double upsilon0 = 0.0;
    bool x_independent = false;
    std::vector<double> chi;  // cutoff per cross node

    double epsilon() const { return background.epsilon; }
    bool on_collar(int i) const { return chi[i] == 1.0; }
};

/// Builds the blended pair and verifies the admissibility certificates:
/// nodewise floor (rejected with the offending node index on violation) and
/// the boundary traces of the nested operator.  collar_width must cover the
/// one-sided stencil span (4 cross cells).
AdmissiblePair build_pair(const FactoryParams& params, GridPtr grid);

struct PerturbationParams {
    double a = 1.0;      // envelope amplitude
    double b = 1.0;      // envelope rate
    double d_eps = 2.0;  // envelope power, must exceed 2 (1+eps)/3
    double epsilon = 1.0;
};

/// Throws std::invalid_argument when the envelope power is not strictly
/// admissible for the given epsilon, or rates are not positive.
void validate(const PerturbationParams& pp);

/// Checks a * exp(-b <L>^{d_eps}) < grid.truncation_tol(), i.e. the decay
/// envelope is numerically negligible at the axial caps.
void require_truncation_admissible(const PerturbationParams& pp,
                                   const CylinderGrid& grid);

/// rho = amplitude * sin^2(pi (x'-a)/(b-a)) * exp(-b <x_n>^{d_eps}).
/// Requires 0 <= amplitude <= a and a truncation-admissible grid.
GridFunction make_perturbation(const PerturbationParams& pp, GridPtr grid,
                               double amplitude);

struct DecayReport {
    bool pass = false;
    /// a minus the worst envelope-normalized deviation (equals a when q == q0).
    double slack = 0.0;
    double worst_excess = 0.0;        // worst |q - q0| - a * envelope
    int worst_cross = -1;
    int worst_axial = -1;
    double roundoff_floor = 0.0;      // additive deviation ignored as round-off
};

/// Nodewise membership of q in the decay class around q0.
DecayReport check_decay_class(const GridFunction& q, const GridFunction& q0,
                              const PerturbationParams& pp);

}  // namespace wgstab
