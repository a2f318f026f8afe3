#ifndef PGEOM_DYNAMICS_HPP
#define PGEOM_DYNAMICS_HPP

#include "pgeom/dirac.hpp"
#include "pgeom/structures.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace pgeom {

struct Monitor {
    std::string name;
    Expression expr;
};

/// Sampled integral line with per-step monitor values.
struct Trajectory {
    std::vector<std::string> coordinates;
    std::vector<double> times;                 // uniform grid, tau_k = k h
    std::vector<std::vector<double>> states;   // states[k][i]
    std::vector<std::string> monitor_names;
    std::vector<std::vector<double>> monitors; // monitors[k][m]
    std::string integrator;
    double step = 0.0;

    const std::vector<double>& final_state() const { return states.back(); }
    /// Largest |value - value_at_start| over the whole line, per monitor.
    double max_drift(const std::string& monitor) const;
    double max_abs(const std::string& monitor) const;
};

/// Classical fixed-step fourth-order Runge-Kutta on the Hamiltonian flow of
/// H; monitors are evaluated at accepted steps only.
Trajectory integrate(const PoissonStructure& P, const ScalarField& H,
                     const std::vector<double>& z0,
                     const std::map<std::string, double>& params, double tau_end,
                     double h, const std::vector<Monitor>& monitors = {});

/// Flow of the Dirac bracket of H. The start point must satisfy the
/// constraints to 1e-10; constraint monitors are always included. Falls back
/// to per-point numeric assembly when the symbolic tensor is out of reach.
Trajectory integrate_dirac(const PoissonStructure& P, const ScalarField& H,
                           const ConstraintSet& C, const std::vector<double>& z0,
                           const std::map<std::string, double>& params,
                           double tau_end, double h,
                           const std::vector<Monitor>& monitors = {});

/// Multiplier form: dz = {z,H0} + lambda^a {z,Phi_a} with the multipliers
/// evaluated along the path and recorded as monitors lambda1, lambda2, ...
Trajectory integrate_multiplier(const PoissonStructure& P, const ScalarField& H0,
                                const ConstraintSet& C, const std::vector<double>& z0,
                                const std::map<std::string, double>& params,
                                double tau_end, double h,
                                const std::vector<Monitor>& monitors = {});

struct SeriesResult {
    std::vector<double> point;
    bool transcendental = false; // some iterated bracket left the rational class
};

/// Truncated exponential-series solution: sum_m tau^m/m! L^m z | z0 with
/// L(F) = {F, H}, the iterated brackets computed symbolically.
SeriesResult series_solution(const PoissonStructure& P, const ScalarField& H,
                             const std::vector<double>& z0,
                             const std::map<std::string, double>& params, double tau,
                             int order);

/// RK4 flow of an arbitrary vector field.
std::vector<double> flow_map(const VectorField& V,
                             const std::map<std::string, double>& params,
                             double tau, double h, const std::vector<double>& z0);

/// Time-tau advance along a vector field; composes additively in tau up to
/// integrator tolerance.
struct FlowMap {
    VectorField field;
    double tau = 0.0;
    double h = 1e-3;

    std::vector<double> operator()(const std::vector<double>& z0,
                                   const std::map<std::string, double>& params = {}) const {
        return flow_map(field, params, tau, h, z0);
    }
};

struct CommutativityResult {
    double flow_gap = 0.0;     // |phi_tau(psi_lambda(z0)) - psi_lambda(phi_tau(z0))|
    double bracket_norm = 0.0; // |[V,U](z0)|
};

CommutativityResult commutativity_check(const VectorField& V, const VectorField& U,
                                        double tau, double lambda,
                                        const std::vector<double>& z0,
                                        const std::map<std::string, double>& params,
                                        double h);

/// CSV with header tau,<coords>,<monitors>; 17 significant digits.
void write_csv(const Trajectory& t, std::ostream& out);

} // namespace pgeom

#endif
