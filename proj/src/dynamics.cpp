#include "pgeom/dynamics.hpp"

#include "pgeom/error.hpp"
#include "pgeom/linalg.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>

namespace pgeom {

double Trajectory::max_drift(const std::string& monitor) const {
    for (size_t m = 0; m < monitor_names.size(); ++m) {
        if (monitor_names[m] != monitor) continue;
        double first = monitors.front()[m];
        double drift = 0.0;
        for (const auto& row : monitors)
            drift = std::max(drift, std::abs(row[m] - first));
        return drift;
    }
    fail(ErrorKind::Validation, "unknown monitor '" + monitor + "'");
}

double Trajectory::max_abs(const std::string& monitor) const {
    for (size_t m = 0; m < monitor_names.size(); ++m) {
        if (monitor_names[m] != monitor) continue;
        double v = 0.0;
        for (const auto& row : monitors) v = std::max(v, std::abs(row[m]));
        return v;
    }
    fail(ErrorKind::Validation, "unknown monitor '" + monitor + "'");
}

namespace {

using FieldFn = std::function<void(const double* slots, double* deriv)>;

struct SlotLayout {
    std::vector<std::string> names; // coordinates then parameters
    int ncoords = 0;

    static SlotLayout of(const Chart& ch) {
        SlotLayout s;
        s.names = ch.symbols();
        s.ncoords = ch.dim();
        return s;
    }
};

std::vector<double> full_slots(const SlotLayout& layout, const std::vector<double>& z,
                               const std::map<std::string, double>& params) {
    if (static_cast<int>(z.size()) != layout.ncoords)
        fail(ErrorKind::Validation, "start point has wrong dimension");
    std::vector<double> slots(layout.names.size(), 0.0);
    for (int i = 0; i < layout.ncoords; ++i) slots[i] = z[i];
    for (size_t i = layout.ncoords; i < layout.names.size(); ++i) {
        auto it = params.find(layout.names[i]);
        if (it == params.end())
            fail(ErrorKind::Validation,
                 "missing value for parameter '" + layout.names[i] + "'");
        slots[i] = it->second;
    }
    return slots;
}

FieldFn compiled_field(const VectorField& V, const SlotLayout& layout) {
    auto compiled = std::make_shared<std::vector<CompiledExpr>>();
    for (const auto& comp : V.components)
        compiled->emplace_back(comp, layout.names);
    const int n = layout.ncoords;
    return [compiled, n](const double* slots, double* deriv) {
        for (int i = 0; i < n; ++i) deriv[i] = (*compiled)[i].eval(slots);
    };
}

Trajectory run_rk4(const SlotLayout& layout, const FieldFn& field,
                   const std::vector<double>& z0,
                   const std::map<std::string, double>& params, double tau_end,
                   double h, const std::vector<Monitor>& monitors,
                   const std::string& label) {
    if (h <= 0) fail(ErrorKind::Validation, "step size must be positive");
    if (tau_end < h) fail(ErrorKind::Validation, "tau_end must be at least one step");
    // fit the uniform grid to the horizon: the step used is the nearest value
    // to h that divides tau_end exactly
    const long long nsteps = std::max(1LL, std::llround(tau_end / h));
    h = tau_end / static_cast<double>(nsteps);
    const int n = layout.ncoords;

    std::vector<CompiledExpr> mon;
    mon.reserve(monitors.size());
    Trajectory t;
    for (const auto& m : monitors) {
        mon.emplace_back(m.expr, layout.names);
        t.monitor_names.push_back(m.name);
    }
    t.coordinates.assign(layout.names.begin(), layout.names.begin() + n);
    t.integrator = label;
    t.step = h;

    std::vector<double> slots = full_slots(layout, z0, params);
    std::vector<double> y(slots.begin(), slots.begin() + n);
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);

    auto eval_field = [&](const std::vector<double>& state, std::vector<double>& out,
                          double tau) {
        for (int i = 0; i < n; ++i) slots[i] = state[i];
        try {
            field(slots.data(), out.data());
        } catch (const Error& e) {
            fail(ErrorKind::Numeric,
                 "field evaluation failed at tau = " + std::to_string(tau) + ": " +
                     e.what());
        }
    };
    auto record = [&](double tau, const std::vector<double>& state) {
        for (int i = 0; i < n; ++i) slots[i] = state[i];
        t.times.push_back(tau);
        t.states.push_back(state);
        std::vector<double> row;
        row.reserve(mon.size());
        for (size_t m = 0; m < mon.size(); ++m) {
            try {
                row.push_back(mon[m].eval(slots.data()));
            } catch (const Error& e) {
                fail(ErrorKind::Numeric,
                     "monitor '" + t.monitor_names[m] + "' failed at tau = " +
                         std::to_string(tau) + ": " + e.what());
            }
        }
        t.monitors.push_back(std::move(row));
    };

    record(0.0, y);
    for (long long step = 1; step <= nsteps; ++step) {
        double tau = static_cast<double>(step - 1) * h;
        eval_field(y, k1, tau);
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        eval_field(tmp, k2, tau + 0.5 * h);
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        eval_field(tmp, k3, tau + 0.5 * h);
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
        eval_field(tmp, k4, tau + h);
        for (int i = 0; i < n; ++i)
            y[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        for (int i = 0; i < n; ++i)
            if (!std::isfinite(y[i]))
                fail(ErrorKind::Numeric,
                     "state became non-finite at tau = " +
                         std::to_string(static_cast<double>(step) * h));
        record(static_cast<double>(step) * h, y);
    }
    return t;
}

std::vector<Monitor> with_constraint_monitors(const ConstraintSet& C,
                                              std::vector<Monitor> monitors) {
    for (int a = 0; a < C.size(); ++a) {
        std::string name = "Phi" + std::to_string(a + 1);
        bool present = false;
        for (const auto& m : monitors) present = present || m.name == name;
        if (!present) monitors.push_back(Monitor{name, C.expr(a)});
    }
    return monitors;
}

void require_on_surface(const ConstraintSet& C, const std::vector<double>& z0,
                        const std::map<std::string, double>& params) {
    SlotLayout layout = SlotLayout::of(C.chart());
    std::vector<double> slots = full_slots(layout, z0, params);
    std::map<std::string, double> pt;
    for (size_t i = 0; i < layout.names.size(); ++i) pt[layout.names[i]] = slots[i];
    for (int a = 0; a < C.size(); ++a) {
        double v = evaluate(C.expr(a), pt);
        if (std::abs(v) > 1e-10)
            fail(ErrorKind::Validation,
                 "start point violates constraint " + C.expr(a).str() + " by " +
                     std::to_string(v));
    }
}

} // namespace

Trajectory integrate(const PoissonStructure& P, const ScalarField& H,
                     const std::vector<double>& z0,
                     const std::map<std::string, double>& params, double tau_end,
                     double h, const std::vector<Monitor>& monitors) {
    if (!(P.chart() == H.chart)) fail(ErrorKind::Validation, "integrate: chart mismatch");
    SlotLayout layout = SlotLayout::of(P.chart());
    FieldFn field = compiled_field(hamiltonian_field(P, H), layout);
    return run_rk4(layout, field, z0, params, tau_end, h, monitors, "rk4-poisson");
}

Trajectory integrate_dirac(const PoissonStructure& P, const ScalarField& H,
                           const ConstraintSet& C, const std::vector<double>& z0,
                           const std::map<std::string, double>& params,
                           double tau_end, double h,
                           const std::vector<Monitor>& monitors) {
    require_on_surface(C, z0, params);
    SlotLayout layout = SlotLayout::of(P.chart());
    std::vector<Monitor> mons = with_constraint_monitors(C, monitors);

    if (C.size() <= 8 && P.chart().dim() <= 8) {
        DiracResult D = dirac_bracket(P, C);
        FieldFn field = compiled_field(hamiltonian_field(D.omega_d, H), layout);
        return run_rk4(layout, field, z0, params, tau_end, h, mons, "rk4-dirac");
    }

    // numeric per-point assembly
    const Chart& ch = P.chart();
    const int n = ch.dim();
    std::vector<CompiledExpr> dH;
    for (const auto& c : ch.coordinates)
        dH.emplace_back(differentiate(H.expr, c), layout.names);
    auto names = layout.names;
    FieldFn field = [&P, &C, dH, names, n](const double* slots, double* deriv) {
        std::map<std::string, double> pt;
        for (size_t i = 0; i < names.size(); ++i) pt[names[i]] = slots[i];
        Mat omega_d = dirac_tensor_at(P, C, pt);
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += omega_d(i, j) * dH[j].eval(slots);
            deriv[i] = s;
        }
    };
    return run_rk4(layout, field, z0, params, tau_end, h, mons, "rk4-dirac-numeric");
}

Trajectory integrate_multiplier(const PoissonStructure& P, const ScalarField& H0,
                                const ConstraintSet& C, const std::vector<double>& z0,
                                const std::map<std::string, double>& params,
                                double tau_end, double h,
                                const std::vector<Monitor>& monitors) {
    require_on_surface(C, z0, params);
    SlotLayout layout = SlotLayout::of(P.chart());
    const Chart& ch = P.chart();
    const int n = ch.dim();

    std::vector<Expression> lambda = multipliers(P, H0, C);
    VectorField XH = hamiltonian_field(P, H0);
    std::vector<Expression> comps(n);
    for (int i = 0; i < n; ++i) {
        std::vector<Expression> terms = {XH.components[i]};
        for (int a = 0; a < C.size(); ++a) {
            Expression g = bracket_expr(P, Expression::symbol(ch.coordinates[i]), C.expr(a));
            if (g.is_literal_zero() || lambda[a].is_literal_zero()) continue;
            terms.push_back(lambda[a] * g);
        }
        comps[i] = normalize(Expression::sum(std::move(terms)));
    }

    std::vector<Monitor> mons = with_constraint_monitors(C, monitors);
    for (int a = 0; a < C.size(); ++a)
        mons.push_back(Monitor{"lambda" + std::to_string(a + 1), lambda[a]});

    FieldFn field = compiled_field(VectorField{ch, comps}, layout);
    return run_rk4(layout, field, z0, params, tau_end, h, mons, "rk4-multiplier");
}

SeriesResult series_solution(const PoissonStructure& P, const ScalarField& H,
                             const std::vector<double>& z0,
                             const std::map<std::string, double>& params, double tau,
                             int order) {
    if (order < 0 || order > 12)
        fail(ErrorKind::Validation,
             "series order must lie in [0, 12], got " + std::to_string(order));
    const Chart& ch = P.chart();
    const int n = ch.dim();
    SlotLayout layout = SlotLayout::of(ch);
    std::vector<double> slots = full_slots(layout, z0, params);
    std::map<std::string, double> pt;
    for (size_t i = 0; i < layout.names.size(); ++i) pt[layout.names[i]] = slots[i];

    SeriesResult result;
    result.point.assign(n, 0.0);
    bool transcendental = !is_rational_form(H.expr);
    for (const auto& e : P.upper_triangle())
        transcendental = transcendental || !is_rational_form(e);

    for (int i = 0; i < n; ++i) {
        Expression iterate = Expression::symbol(ch.coordinates[i]);
        double acc = 0.0;
        double factor = 1.0; // tau^m / m!
        for (int m = 0; m <= order; ++m) {
            if (m > 0) {
                iterate = bracket_expr(P, iterate, H.expr);
                factor *= tau / m;
            }
            transcendental = transcendental || !is_rational_form(iterate);
            acc += factor * evaluate(iterate, pt);
            if (iterate.is_literal_zero()) break;
        }
        result.point[i] = acc;
    }
    result.transcendental = transcendental;
    return result;
}

std::vector<double> flow_map(const VectorField& V,
                             const std::map<std::string, double>& params,
                             double tau, double h, const std::vector<double>& z0) {
    SlotLayout layout = SlotLayout::of(V.chart);
    FieldFn field = compiled_field(V, layout);
    if (tau == 0.0) return z0;
    Trajectory t = run_rk4(layout, field, z0, params, tau, h, {}, "rk4-flow");
    return t.final_state();
}

CommutativityResult commutativity_check(const VectorField& V, const VectorField& U,
                                        double tau, double lambda,
                                        const std::vector<double>& z0,
                                        const std::map<std::string, double>& params,
                                        double h) {
    if (!(V.chart == U.chart))
        fail(ErrorKind::Validation, "commutativity_check: chart mismatch");
    std::vector<double> a = flow_map(V, params, tau, h, flow_map(U, params, lambda, h, z0));
    std::vector<double> b = flow_map(U, params, lambda, h, flow_map(V, params, tau, h, z0));
    CommutativityResult r;
    for (size_t i = 0; i < a.size(); ++i) r.flow_gap += (a[i] - b[i]) * (a[i] - b[i]);
    r.flow_gap = std::sqrt(r.flow_gap);

    VectorField W = lie_bracket(V, U);
    SlotLayout layout = SlotLayout::of(V.chart);
    std::vector<double> slots = full_slots(layout, z0, params);
    std::map<std::string, double> pt;
    for (size_t i = 0; i < layout.names.size(); ++i) pt[layout.names[i]] = slots[i];
    for (const auto& comp : W.components) {
        double v = evaluate(comp, pt);
        r.bracket_norm += v * v;
    }
    r.bracket_norm = std::sqrt(r.bracket_norm);
    return r;
}

void write_csv(const Trajectory& t, std::ostream& out) {
    out << "tau";
    for (const auto& c : t.coordinates) out << "," << c;
    for (const auto& m : t.monitor_names) out << "," << m;
    out << "\n";
    char buf[40];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf;
    };
    for (size_t k = 0; k < t.times.size(); ++k) {
        put(t.times[k]);
        for (double v : t.states[k]) {
            out << ",";
            put(v);
        }
        for (double v : t.monitors[k]) {
            out << ",";
            put(v);
        }
        out << "\n";
    }
}

} // namespace pgeom
