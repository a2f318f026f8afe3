#include "pgeom/problem.hpp"

#include "pgeom/error.hpp"
#include "pgeom/reduction.hpp"

#include <fstream>
#include <sstream>

namespace pgeom {

namespace {

std::pair<int, int> parse_entry_key(const std::string& key) {
    // "(i,j)" with 1-based indices
    if (key.size() < 5 || key.front() != '(' || key.back() != ')')
        fail(ErrorKind::Parse, "bad tensor entry key '" + key + "'");
    std::string inner = key.substr(1, key.size() - 2);
    auto comma = inner.find(',');
    if (comma == std::string::npos)
        fail(ErrorKind::Parse, "bad tensor entry key '" + key + "'");
    int i = std::stoi(inner.substr(0, comma));
    int j = std::stoi(inner.substr(comma + 1));
    if (i < 1 || j < 1 || i >= j)
        fail(ErrorKind::Parse,
             "tensor entry key '" + key + "' must satisfy 1 <= i < j");
    return {i, j};
}

std::string entry_key(int i, int j) {
    return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

Rational parse_rational(const std::string& text) {
    Expression e = parse(text, {});
    if (!e.is_rational_const())
        fail(ErrorKind::Parse, "expected a rational constant, got '" + text + "'");
    return e.node().rat;
}

const Json& require(const Json& j, const char* key, const char* where) {
    if (!j.contains(key))
        fail(ErrorKind::Parse, std::string("missing '") + key + "' in " + where);
    return j.at(key);
}

} // namespace

ProblemFile ProblemFile::from_json(const Json& j) {
    ProblemFile pf;
    const Json& chart = require(j, "chart", "problem file");
    std::vector<std::string> coords;
    for (const auto& c : require(chart, "coordinates", "chart"))
        coords.push_back(c.get<std::string>());
    std::vector<std::string> params;
    if (chart.contains("parameters")) {
        for (const auto& [name, value] : chart.at("parameters").items()) {
            params.push_back(name);
            pf.parameter_values[name] = value.get<double>();
        }
    }
    pf.chart = Chart(chart.value("name", "chart"), coords, params);
    const std::vector<std::string> symbols = pf.chart.symbols();
    auto expr = [&](const std::string& text) { return parse(text, symbols); };

    const Json& st = require(j, "structure", "problem file");
    pf.structure_type = require(st, "type", "structure").get<std::string>();
    if (pf.structure_type == "canonical") {
        pf.canonical_pairs = require(st, "pairs", "canonical structure").get<int>();
    } else if (pf.structure_type == "lie_poisson") {
        const int n = pf.chart.dim();
        pf.lie_constants.assign(
            n, std::vector<std::vector<Rational>>(n, std::vector<Rational>(n)));
        for (const auto& c : require(st, "constants", "lie_poisson structure")) {
            const auto& ijk = require(c, "ijk", "structure constant");
            int i = ijk.at(0).get<int>(), jj = ijk.at(1).get<int>(), k = ijk.at(2).get<int>();
            if (i < 1 || jj < 1 || k < 1 || i > n || jj > n || k > n)
                fail(ErrorKind::Parse, "structure constant index out of range");
            pf.lie_constants[i - 1][jj - 1][k - 1] =
                parse_rational(require(c, "value", "structure constant").get<std::string>());
        }
    } else if (pf.structure_type == "explicit") {
        for (const auto& [key, text] : require(st, "entries", "explicit structure").items()) {
            auto ij = parse_entry_key(key);
            if (ij.second > pf.chart.dim())
                fail(ErrorKind::Parse, "tensor entry " + key + " out of range");
            pf.explicit_entries.emplace(ij, expr(text.get<std::string>()));
        }
    } else if (pf.structure_type == "prescribed") {
        for (const auto& k : require(st, "casimirs", "prescribed structure"))
            pf.prescribed_casimirs.push_back(expr(k.get<std::string>()));
        for (const auto& s : require(st, "solved", "prescribed structure"))
            pf.prescribed_solved.push_back(s.get<std::string>());
        for (const auto& [key, text] :
             require(require(st, "base", "prescribed structure"), "entries", "base").items())
            pf.prescribed_base.emplace(parse_entry_key(key), Expression());
        // base entries parse over the kept coordinates only
        std::vector<std::string> kept;
        for (const auto& c : pf.chart.coordinates)
            if (std::find(pf.prescribed_solved.begin(), pf.prescribed_solved.end(), c) ==
                pf.prescribed_solved.end())
                kept.push_back(c);
        std::vector<std::string> kept_symbols = kept;
        kept_symbols.insert(kept_symbols.end(), pf.chart.parameters.begin(),
                            pf.chart.parameters.end());
        for (const auto& [key, text] : st.at("base").at("entries").items())
            pf.prescribed_base[parse_entry_key(key)] =
                parse(text.get<std::string>(), kept_symbols);
    } else {
        fail(ErrorKind::Parse, "unknown structure type '" + pf.structure_type + "'");
    }

    if (j.contains("hamiltonian"))
        pf.hamiltonian = expr(j.at("hamiltonian").get<std::string>());
    if (j.contains("constraints")) {
        for (const auto& c : j.at("constraints")) {
            Constraint ct;
            if (c.is_string()) {
                ct.expr = expr(c.get<std::string>());
            } else {
                ct.expr = expr(require(c, "expr", "constraint").get<std::string>());
                std::string origin = c.value("origin", "primary");
                if (origin == "secondary") {
                    ct.origin = ConstraintOrigin::Secondary;
                    ct.step = c.value("step", 1);
                } else if (origin != "primary") {
                    fail(ErrorKind::Parse, "unknown constraint origin '" + origin + "'");
                }
            }
            pf.constraints.push_back(std::move(ct));
        }
    }
    if (j.contains("parametrization")) {
        Parametrization param;
        for (const auto& [name, text] : j.at("parametrization").items()) {
            if (pf.chart.coord_index(name) < 0)
                fail(ErrorKind::Parse, "parametrization solves unknown coordinate '" +
                                           name + "'");
            param.solved.emplace_back(name, expr(text.get<std::string>()));
        }
        pf.parametrization = std::move(param);
    }
    if (j.contains("casimir_candidates"))
        for (const auto& k : j.at("casimir_candidates"))
            pf.casimir_candidates.push_back(expr(k.get<std::string>()));
    if (j.contains("first_integrals"))
        for (const auto& q : j.at("first_integrals"))
            pf.first_integrals.push_back(expr(q.get<std::string>()));

    if (j.contains("integrator")) {
        const Json& it = j.at("integrator");
        Integrator integ;
        integ.mode = it.value("mode", "poisson");
        if (integ.mode != "poisson" && integ.mode != "dirac" &&
            integ.mode != "multiplier" && integ.mode != "series")
            fail(ErrorKind::Parse, "unknown integrator mode '" + integ.mode + "'");
        for (const auto& v : require(it, "z0", "integrator"))
            integ.z0.push_back(v.get<double>());
        if (static_cast<int>(integ.z0.size()) != pf.chart.dim())
            fail(ErrorKind::Parse, "integrator start point has wrong dimension");
        integ.tau_end = require(it, "tau_end", "integrator").get<double>();
        integ.h = require(it, "h", "integrator").get<double>();
        integ.order = it.value("order", 4);
        pf.integrator = std::move(integ);
    }
    return pf;
}

ProblemFile ProblemFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Parse, "cannot open problem file '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        fail(ErrorKind::Parse, "invalid problem file '" + path + "': " + e.what());
    }
    return from_json(j);
}

Json ProblemFile::to_json() const {
    Json j;
    Json chart_json;
    chart_json["name"] = chart.name;
    chart_json["coordinates"] = chart.coordinates;
    if (!chart.parameters.empty()) {
        Json params;
        for (const auto& p : chart.parameters) params[p] = parameter_values.at(p);
        chart_json["parameters"] = params;
    }
    j["chart"] = chart_json;

    Json st;
    st["type"] = structure_type;
    if (structure_type == "canonical") {
        st["pairs"] = canonical_pairs;
    } else if (structure_type == "lie_poisson") {
        Json arr = Json::array();
        const int n = chart.dim();
        for (int i = 0; i < n; ++i)
            for (int jj = 0; jj < n; ++jj)
                for (int k = 0; k < n; ++k)
                    if (!lie_constants[i][jj][k].is_zero()) {
                        Json c;
                        c["ijk"] = {i + 1, jj + 1, k + 1};
                        c["value"] = lie_constants[i][jj][k].str();
                        arr.push_back(c);
                    }
        st["constants"] = arr;
    } else if (structure_type == "explicit") {
        Json entries;
        for (const auto& [ij, e] : explicit_entries)
            if (!e.is_literal_zero()) entries[entry_key(ij.first, ij.second)] = e.str();
        st["entries"] = entries;
    } else if (structure_type == "prescribed") {
        Json ks = Json::array();
        for (const auto& k : prescribed_casimirs) ks.push_back(k.str());
        st["casimirs"] = ks;
        st["solved"] = prescribed_solved;
        Json base_entries;
        for (const auto& [ij, e] : prescribed_base)
            if (!e.is_literal_zero()) base_entries[entry_key(ij.first, ij.second)] = e.str();
        st["base"] = Json{{"entries", base_entries}};
    }
    j["structure"] = st;

    if (hamiltonian) j["hamiltonian"] = hamiltonian->str();
    if (!constraints.empty()) {
        Json arr = Json::array();
        for (const auto& c : constraints) {
            Json cj;
            cj["expr"] = c.expr.str();
            cj["origin"] = c.origin == ConstraintOrigin::Primary ? "primary" : "secondary";
            if (c.origin == ConstraintOrigin::Secondary) cj["step"] = c.step;
            arr.push_back(cj);
        }
        j["constraints"] = arr;
    }
    if (parametrization) {
        Json pj;
        for (const auto& [name, f] : parametrization->solved) pj[name] = f.str();
        j["parametrization"] = pj;
    }
    if (!casimir_candidates.empty()) {
        Json arr = Json::array();
        for (const auto& k : casimir_candidates) arr.push_back(k.str());
        j["casimir_candidates"] = arr;
    }
    if (!first_integrals.empty()) {
        Json arr = Json::array();
        for (const auto& q : first_integrals) arr.push_back(q.str());
        j["first_integrals"] = arr;
    }
    if (integrator) {
        Json it;
        it["mode"] = integrator->mode;
        it["z0"] = integrator->z0;
        it["tau_end"] = integrator->tau_end;
        it["h"] = integrator->h;
        if (integrator->mode == "series") it["order"] = integrator->order;
        j["integrator"] = it;
    }
    return j;
}

PoissonStructure ProblemFile::build_prescribed_base(const ZeroTestOptions& opt) const {
    std::vector<std::string> kept;
    for (const auto& c : chart.coordinates)
        if (std::find(prescribed_solved.begin(), prescribed_solved.end(), c) ==
            prescribed_solved.end())
            kept.push_back(c);
    Chart kept_chart(chart.name + "_base", kept, chart.parameters);
    const int k = kept_chart.dim();
    std::vector<Expression> upper(k * (k - 1) / 2, Expression::integer(0));
    for (const auto& [ij, e] : prescribed_base) {
        if (ij.second > k)
            fail(ErrorKind::Parse, "prescribed base entry out of range");
        upper[upper_index(ij.first - 1, ij.second - 1, k)] = e;
    }
    return PoissonStructure::create(kept_chart, std::move(upper), Provenance::Explicit,
                                    opt);
}

PoissonStructure ProblemFile::build_structure(const ZeroTestOptions& opt) const {
    if (structure_type == "canonical") {
        PoissonStructure base = canonical(canonical_pairs);
        if (base.chart().coordinates == chart.coordinates &&
            chart.parameters.empty())
            return base;
        // rebuild on the declared chart (names may differ or carry parameters)
        if (chart.dim() != base.chart().dim())
            fail(ErrorKind::Parse, "canonical structure does not fit the chart");
        return PoissonStructure::create(chart, base.upper_triangle(),
                                        Provenance::Canonical, opt);
    }
    if (structure_type == "lie_poisson") {
        PoissonStructure base = lie_poisson(lie_constants);
        if (base.chart().coordinates == chart.coordinates && chart.parameters.empty())
            return base;
        if (chart.dim() != base.chart().dim())
            fail(ErrorKind::Parse, "structure constants do not fit the chart");
        std::map<std::string, Expression> rename;
        for (int i = 0; i < chart.dim(); ++i)
            rename.emplace(base.chart().coordinates[i],
                           Expression::symbol(chart.coordinates[i]));
        std::vector<Expression> upper;
        for (const auto& e : base.upper_triangle())
            upper.push_back(substitute(e, rename));
        return PoissonStructure::create(chart, std::move(upper),
                                        Provenance::LiePoisson, opt);
    }
    if (structure_type == "explicit") {
        const int n = chart.dim();
        std::vector<Expression> upper(n * (n - 1) / 2, Expression::integer(0));
        for (const auto& [ij, e] : explicit_entries)
            upper[upper_index(ij.first - 1, ij.second - 1, n)] = e;
        return PoissonStructure::create(chart, std::move(upper), Provenance::Explicit,
                                        opt);
    }
    if (structure_type == "prescribed") {
        PrescribeResult r = prescribe_casimirs(chart, prescribed_casimirs,
                                               prescribed_solved,
                                               build_prescribed_base(opt), opt);
        return r.structure;
    }
    fail(ErrorKind::Parse, "unknown structure type '" + structure_type + "'");
}

std::optional<ConstraintSet> ProblemFile::build_constraints(const ZeroTestOptions& opt) const {
    if (constraints.empty()) return std::nullopt;
    return ConstraintSet::create(chart, constraints, parametrization, opt);
}

ScalarField ProblemFile::require_hamiltonian() const {
    if (!hamiltonian)
        fail(ErrorKind::Parse, "problem file declares no hamiltonian");
    return ScalarField{chart, *hamiltonian};
}

void Report::add_verdict(const std::string& name, const std::string& property,
                         const ZeroVerdict& v, bool required_zero) {
    CheckEntry e;
    e.name = name;
    e.property = property;
    e.pass = required_zero ? v.zero() : true;
    e.tier = v.tier();
    e.verdict = v;
    checks.push_back(std::move(e));
}

bool Report::pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

Json Report::to_json() const {
    Json j;
    j["command"] = command;
    j["seed"] = seed;
    Json arr = Json::array();
    for (const auto& c : checks) {
        Json e;
        e["name"] = c.name;
        e["property"] = c.property;
        e["pass"] = c.pass;
        if (!c.tier.empty()) e["tier"] = c.tier;
        if (c.verdict) {
            e["verdict"] = c.verdict->kind_name();
            if (c.verdict->kind == ZeroVerdict::Kind::NumericZero) {
                e["samples"] = c.verdict->samples;
                e["max_abs"] = c.verdict->max_abs;
            }
            if (c.verdict->kind == ZeroVerdict::Kind::NonZero) {
                Json w = Json::object();
                for (const auto& [name, value] : c.verdict->witness) w[name] = value;
                e["witness"] = w;
                e["witness_value"] = c.verdict->witness_value;
            }
            if (!c.verdict->assumptions.empty())
                e["assumptions"] = c.verdict->assumptions;
        }
        if (c.value) e["value"] = *c.value;
        if (!c.note.empty()) e["note"] = c.note;
        arr.push_back(e);
    }
    j["checks"] = arr;
    j["pass"] = pass();
    return j;
}

std::string Report::to_text() const {
    std::ostringstream os;
    os << "== " << command << " ==\n";
    for (const auto& c : checks) {
        os << (c.pass ? "[PASS] " : "[FAIL] ") << c.name;
        if (c.verdict) {
            os << " - " << c.verdict->kind_name() << " (" << c.tier << ")";
            if (c.verdict->kind == ZeroVerdict::Kind::NumericZero)
                os << " max|value| = " << c.verdict->max_abs << " over "
                   << c.verdict->samples << " samples";
            if (c.verdict->kind == ZeroVerdict::Kind::NonZero) {
                os << " witness value " << c.verdict->witness_value << " at (";
                bool first = true;
                for (const auto& [name, value] : c.verdict->witness) {
                    if (!first) os << ", ";
                    os << name << " = " << value;
                    first = false;
                }
                os << ")";
            }
            for (const auto& a : c.verdict->assumptions) os << " [assuming " << a << "]";
        } else if (c.value) {
            os << " = " << *c.value;
        }
        if (!c.note.empty()) os << "  (" << c.note << ")";
        os << "\n";
    }
    os << (pass() ? "PASS" : "FAIL") << " (" << checks.size() << " checks)\n";
    return os.str();
}

} // namespace pgeom
