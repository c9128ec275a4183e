#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <vector>

#include "wgstab/grid.hpp"

namespace wgstab {

/// Candidate profile on the cross-section used to build the singular weights.
/// The profile depends on x' only; `observed` lists the wall(s) where the
/// boundary term of the estimate must be collected (the sign rule below).
struct BetaCandidate {
    std::function<double(double)> value;
    std::function<double(double)> grad;
    std::function<double(double)> hess;
    std::set<Side> observed;
};

/// (x' - x0)^2 with the observed wall(s) chosen by the sign of
/// (x_wall - x0) * normal.  Requires x0 outside the closed cross-section.
BetaCandidate quadratic_candidate(double x0, const CrossSection& omega);

/// One verified condition: the certified extreme value and where it occurs.
struct ConditionCheck {
    bool pass = false;
    double value = 0.0;
    double witness = 0.0;
};

/// Node-wise verification of the three structural conditions on a candidate:
/// (i) the gradient is bounded away from zero, (ii) the profile is outgoing
/// only through the observed wall(s), (iii) lambda * grad^2 + hess admits a
/// positive lower bound eps for every lambda > lambda1.
struct AssumptionReport {
    double c0 = 0.0;       // certified min |grad|
    double eps = 0.0;      // certified convexity margin
    double lambda1 = 0.0;  // convexity holds for all lambda > lambda1
    ConditionCheck gradient;
    ConditionCheck outflow;
    ConditionCheck convexity;
    bool pass() const { return gradient.pass && outflow.pass && convexity.pass; }
};

AssumptionReport check_assumption(const BetaCandidate& beta, const CrossSection& omega);

/// Parameters of the weight pair
///   phi = exp(lambda * beta) / ((T + t)(T - t)),
///   eta = (exp(2 lambda K) - exp(lambda * beta)) / ((T + t)(T - t)),
/// with beta = beta_tilde + K and K = r * max |beta_tilde|.
struct WeightSpec {
    BetaCandidate beta;
    double r = 2.0;
    double K = 0.0;
    double lambda = 0.1;
    double s = 2.0;
    double T = 1.0;
};

/// Builds a WeightSpec and freezes K from the node-wise max of |beta_tilde|.
/// Rejects r <= 1, non-positive lambda / T / s, and lambda large enough that
/// exp(2 lambda K) leaves the double range (the weights blow up with lambda
/// very quickly; the guard keeps that failure loud).
WeightSpec make_weight_spec(const BetaCandidate& beta, const CrossSection& omega,
                            double r = 2.0, double lambda = 0.1, double T = 1.0,
                            double s = 2.0);

// Point evaluators; both throw outside |t| < T where the weights blow up.
double weight_phi(const WeightSpec& ws, double t, double xp);
double weight_eta(const WeightSpec& ws, double t, double xp);

/// Cross-section profiles of the weights and their derivatives at fixed t.
/// eta is x_n-independent, so one row per cross node is the whole field.
struct WeightSlice {
    double t = 0.0;
    std::vector<double> phi;
    std::vector<double> eta;
    std::vector<double> eta_t;
    std::vector<double> eta_x;   // d/dx' eta
    std::vector<double> eta_xx;  // d2/dx'2 eta
};

WeightSlice weight_slice(const WeightSpec& ws, const CrossSection& omega, double t);

/// Smooth randomized test function for the conjugation and ratio studies:
/// a wall-vanishing cubic in x', a Gaussian in x_n, and a time envelope
/// supported in |t| <= margin * T.  Deterministic per (seed, index).
class StudySample {
public:
    StudySample(std::uint64_t seed, std::uint64_t index, double T, double margin = 0.9);

    /// Tensor-product slice at time t on the grid's spatial nodes.
    GridFunction slice(const GridPtr& grid, double t) const;

    double time_factor(double t) const;

private:
    cplx poly_[3];
    double center_ = 0.0;
    double width_ = 1.0;
    double T_ = 1.0;
    double margin_ = 0.9;
};

using SpaceTimeField = std::function<GridFunction(double t)>;

/// Discrete defect of the conjugation identity
///   exp(-s eta) L (exp(s eta) w) = -(M1 + M2) w,   L = -i d/dt - Laplacian,
/// measured in L2 over the cylinder and the interior time slices.
/// `reference` is the size of (M1 + M2) w on the same quadrature, so
/// residual / reference is a relative defect.
struct ConjugationReport {
    double residual = 0.0;
    double reference = 0.0;
    int time_slices = 0;
};

/// Evaluates the identity on `n_time` cell-centred slices of (-T, T).
/// The field must vanish identically on the extreme slices; otherwise the
/// exponential factor overflows before the quadrature can see it, and the
/// check throws instead of returning garbage.
ConjugationReport conjugation_residual(const SpaceTimeField& w, const WeightSpec& ws,
                                       const GridPtr& grid, int n_time);

/// One row of the ratio study: the weighted-interior-to-data quotient
/// maximized and averaged over the sample family at a fixed parameter s.
struct RatioRow {
    double s = 0.0;
    double max_ratio = 0.0;
    double mean_ratio = 0.0;
};

struct RatioStudy {
    std::vector<RatioRow> rows;
    int samples = 0;
    bool finite = true;
};

/// For each s, forms
///   s |exp(-s eta) grad_x' w|^2 + s^3 |exp(-s eta) w|^2 + |M1 z|^2 + |M2 z|^2
/// against
///   s |exp(-s eta) phi^(1/2) (dn beta)^(1/2) dn w|^2 on the observed wall(s)
///   + |exp(-s eta) L w|^2,
/// with z = exp(-s eta) w, over `samples` randomized fields.  The observed
/// walls must carry dn beta >= 0 (that is what the sign rule certifies).
RatioStudy carleman_ratio_study(const WeightSpec& ws, const GridPtr& grid, int n_time,
                                int samples, const std::vector<double>& s_values,
                                std::uint64_t seed);

}  // namespace wgstab
