#include "report.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

#include "monodromy/oracle.hpp"

namespace mono::cli {

namespace {

constexpr double kVerifyTol = 1e-6;

[[noreturn]] void parse_error(const std::string& what) { throw Error("cli", "ParseError", what); }

cplx parse_complex(const json& v, const std::string& where) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        parse_error(where + " must be [re, im]");
    return {v[0].get<double>(), v[1].get<double>()};
}

json real_matrix_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        out.push_back(row);
    }
    return out;
}

json vector_json(const std::vector<cplx>& v) {
    json out = json::array();
    for (auto x : v) out.push_back(complex_json(x));
    return out;
}

json vector_json(const CVec& v) {
    json out = json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(complex_json(v(i)));
    return out;
}

json bools_json(const std::vector<bool>& v) {
    json out = json::array();
    for (bool b : v) out.push_back(b);
    return out;
}

bool wants(const JobSpec& job, const std::string& c) {
    return std::find(job.commands.begin(), job.commands.end(), c) != job.commands.end();
}

json rays_section(const DirectionFrame& fr) {
    json r;
    r["eta"] = fr.eta;
    r["nu"] = fr.nu;
    r["m"] = fr.m;
    r["mu"] = fr.mu;
    r["critical_eta"] = fr.criticals;
    r["tau"] = fr.tau;
    r["eta_jk"] = real_matrix_json(fr.eta_jk);
    return r;
}

json dominance_section(const DirectionFrame& fr) {
    json d;
    d["order"] = fr.dominance_order();
    int n = static_cast<int>(fr.prec.rows());
    json p = json::array();
    for (int j = 0; j < n; ++j) {
        json row = json::array();
        for (int k = 0; k < n; ++k) row.push_back(static_cast<bool>(fr.prec(j, k)));
        p.push_back(row);
    }
    d["precedes"] = p;
    return d;
}

json verify_section(const Analysis& a) {
    json v;
    auto plus = oracle::stokes_direct(a.sys, a.fr.eta);
    auto minus = oracle::stokes_direct(a.sys, a.fr.eta - kPi);
    CMat minus_inv = minus.S.inverse();
    double d_plus = (plus.S - a.data.S_plus).cwiseAbs().maxCoeff();
    double d_minus = (minus_inv - a.data.S_minus_inv).cwiseAbs().maxCoeff();
    v["S_plus_thm"] = matrix_json(a.data.S_plus);
    v["S_plus_oracle"] = matrix_json(plus.S);
    v["max_diff_S_plus"] = d_plus;
    v["S_minus_inv_thm"] = matrix_json(a.data.S_minus_inv);
    v["S_minus_inv_oracle"] = matrix_json(minus_inv);
    v["max_diff_S_minus_inv"] = d_minus;
    v["oracle_spread"] = std::max(plus.spread, minus.spread);
    v["tolerance"] = kVerifyTol;
    v["pass"] = d_plus <= kVerifyTol && d_minus <= kVerifyTol;
    return v;
}

}  // namespace

json complex_json(cplx v) { return json::array({v.real(), v.imag()}); }

json matrix_json(const CMat& m) {
    json out = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
        out.push_back(row);
    }
    return out;
}

const std::vector<std::string>& all_commands() {
    static const std::vector<std::string> c{"rays", "connection", "monodromy", "stokes", "verify"};
    return c;
}

JobSpec parse_job(const json& input, const std::vector<std::string>& commands) {
    if (!input.is_object()) parse_error("input must be an object");
    JobSpec job;
    job.echo = input;
    if (!input.contains("n") || !input["n"].is_number_integer()) parse_error("\"n\" must be an integer");
    int n = input["n"].get<int>();
    if (n < 1) parse_error("\"n\" must be positive");
    if (!input.contains("lambda") || !input["lambda"].is_array() || static_cast<int>(input["lambda"].size()) != n)
        parse_error("\"lambda\" must list n entries");
    std::vector<cplx> lambda;
    for (int i = 0; i < n; ++i) lambda.push_back(parse_complex(input["lambda"][i], "lambda[" + std::to_string(i) + "]"));
    if (!input.contains("A1") || !input["A1"].is_array() || static_cast<int>(input["A1"].size()) != n)
        parse_error("\"A1\" must have n rows");
    CMat a1(n, n);
    for (int i = 0; i < n; ++i) {
        const json& row = input["A1"][i];
        if (!row.is_array() || static_cast<int>(row.size()) != n) parse_error("row " + std::to_string(i) + " of A1 must have n entries");
        for (int j = 0; j < n; ++j)
            a1(i, j) = parse_complex(row[j], "A1[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    }
    if (input.contains("eta")) {
        if (!input["eta"].is_number()) parse_error("\"eta\" must be a number");
        job.eta = input["eta"].get<double>();
    }
    if (input.contains("series_order")) {
        if (!input["series_order"].is_number_integer()) parse_error("\"series_order\" must be an integer");
        job.series_order = input["series_order"].get<int>();
    }
    if (input.contains("tol")) {
        if (!input["tol"].is_number()) parse_error("\"tol\" must be a number");
        job.tol = input["tol"].get<double>();
    }
    if (input.contains("seed")) {
        if (!input["seed"].is_number_integer()) parse_error("\"seed\" must be an integer");
        job.seed = input["seed"].get<long long>();
    }
    if (job.series_order < 1) parse_error("\"series_order\" must be positive");
    if (!(job.tol > 0)) parse_error("\"tol\" must be positive");
    for (auto& c : commands)
        if (std::find(all_commands().begin(), all_commands().end(), c) == all_commands().end())
            parse_error("unknown command " + c);
    job.commands = commands;
    try {
        job.system = validate_system(n, lambda, a1);
    } catch (const Error& e) {
        parse_error(e.what());
    }
    return job;
}

Outcome run(const JobSpec& job) {
    Outcome out;
    json& r = out.report;
    json echo = job.echo;
    if (job.eta) echo["eta"] = *job.eta;
    echo["series_order"] = job.series_order;
    echo["tol"] = job.tol;
    r["input"] = echo;
    r["commands"] = job.commands;
    const RankOneSystem& sys = job.system;
    try {
        double eta = job.eta ? *job.eta : default_eta(sys);
        DirectionFrame fr = frame(sys, eta);
        json tags = json::array();
        for (int k = 0; k < sys.n; ++k) {
            json t;
            t["pole"] = k;
            t["lambda_prime"] = complex_json(sys.lambda_prime[k]);
            t["tag"] = to_string(classify(sys.lambda_prime[k]));
            tags.push_back(t);
        }
        r["case_tags"] = tags;
        if (wants(job, "rays")) {
            r["critical_directions"] = rays_section(fr);
            r["dominance"] = dominance_section(fr);
        }
        bool need = wants(job, "connection") || wants(job, "monodromy") || wants(job, "stokes") || wants(job, "verify");
        if (!need) return out;

        Analysis a = analyze(sys, eta, job.series_order, job.tol, wants(job, "stokes"));
        if (wants(job, "connection")) {
            r["C"] = matrix_json(a.C.c);
            r["err_C"] = real_matrix_json(a.C.err);
            r["degeneracy"] = {{"zero_rows", bools_json(a.C.zero_rows)},
                               {"zero_cols", bools_json(a.C.zero_cols)},
                               {"integer_eigenvalue", a.C.integer_eigenvalue},
                               {"det_C", complex_json(a.C.c.determinant())}};
        }
        const MonodromyData& d = a.data;
        if (wants(job, "monodromy")) {
            json M = json::array();
            for (auto& m : d.M) M.push_back(matrix_json(m));
            r["M"] = M;
            if (d.has_M_star) {
                json Ms = json::array();
                for (auto& m : d.M_star) Ms.push_back(matrix_json(m));
                r["M_star"] = Ms;
            } else {
                r["M_star_note"] = d.M_star_note;
            }
            r["alpha"] = vector_json(d.alpha);
            r["beta"] = vector_json(d.beta);
            r["infinity"] = {{"M_inf", matrix_json(d.infinity.M_inf)},
                             {"eigenvalues", vector_json(d.infinity.eigenvalues)},
                             {"expected", vector_json(d.infinity.expected)},
                             {"mismatch", d.infinity.mismatch},
                             {"fundamental", d.infinity.fundamental}};
        }
        if (wants(job, "stokes")) {
            r["S_plus"] = matrix_json(d.S_plus);
            r["S_minus_inv"] = matrix_json(d.S_minus_inv);
            json W = json::object();
            for (auto& [nu, w] : d.W) W[std::to_string(nu)] = matrix_json(w);
            r["W"] = W;
            CMat prod = factor_product_inverse(d.W, fr.nu, fr.mu);
            r["factor_check"] = (prod - d.S_plus).cwiseAbs().maxCoeff();
        }
        if (wants(job, "monodromy") || wants(job, "stokes")) {
            r["traces"] = {{"tr", vector_json(d.traces.tr)},
                           {"tr_closed", vector_json(d.traces.tr_closed)},
                           {"tr_pair", matrix_json(d.traces.tr_pair)},
                           {"tr_pair_closed", matrix_json(d.traces.tr_pair_closed)},
                           {"max_diff", d.traces.max_diff}};
        }
        if (wants(job, "verify")) {
            r["verify"] = verify_section(a);
            if (!r["verify"]["pass"].get<bool>()) out.status = 3;
        }
    } catch (const Error& e) {
        r["error"] = {{"module", e.module()}, {"kind", e.kind()}, {"message", e.what()}};
        out.status = 2;
    }
    return out;
}

namespace {

enum class Shape { RealVector, RealMatrix, ComplexVector, ComplexMatrix, Real };

void flatten(const std::string& name, const json& v, Shape shape, std::ostringstream& os) {
    auto cell = [&](size_t i, size_t j, const json& x, bool complex) {
        os << name << ',' << i << ',' << j << ',';
        if (complex)
            os << x[0].get<double>() << ',' << x[1].get<double>() << '\n';
        else
            os << x.get<double>() << ",0\n";
    };
    switch (shape) {
        case Shape::Real: cell(0, 0, v, false); break;
        case Shape::RealVector:
        case Shape::ComplexVector:
            for (size_t i = 0; i < v.size(); ++i) cell(i, 0, v[i], shape == Shape::ComplexVector);
            break;
        case Shape::RealMatrix:
        case Shape::ComplexMatrix:
            for (size_t i = 0; i < v.size(); ++i)
                for (size_t j = 0; j < v[i].size(); ++j) cell(i, j, v[i][j], shape == Shape::ComplexMatrix);
            break;
    }
}

}  // namespace

std::string to_csv(const json& report) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "section,row,col,re,im\n";
    auto put = [&](const std::string& name, const json* v, Shape shape) {
        if (v) flatten(name, *v, shape, os);
    };
    auto find = [&](const json& obj, const std::string& key) -> const json* {
        return obj.contains(key) ? &obj[key] : nullptr;
    };
    if (auto c = find(report, "critical_directions")) {
        put("critical_eta", find(*c, "critical_eta"), Shape::RealVector);
        put("tau", find(*c, "tau"), Shape::RealVector);
    }
    put("C", find(report, "C"), Shape::ComplexMatrix);
    put("err_C", find(report, "err_C"), Shape::RealMatrix);
    for (auto key : {"M", "M_star"})
        if (auto list = find(report, key))
            for (size_t i = 0; i < list->size(); ++i)
                put(std::string(key) + "[" + std::to_string(i) + "]", &(*list)[i], Shape::ComplexMatrix);
    put("S_plus", find(report, "S_plus"), Shape::ComplexMatrix);
    put("S_minus_inv", find(report, "S_minus_inv"), Shape::ComplexMatrix);
    if (auto W = find(report, "W"))
        for (auto& [nu, w] : W->items()) put("W[" + nu + "]", &w, Shape::ComplexMatrix);
    if (auto t = find(report, "traces")) {
        put("traces.tr", find(*t, "tr"), Shape::ComplexVector);
        put("traces.tr_closed", find(*t, "tr_closed"), Shape::ComplexVector);
        put("traces.tr_pair", find(*t, "tr_pair"), Shape::ComplexMatrix);
        put("traces.tr_pair_closed", find(*t, "tr_pair_closed"), Shape::ComplexMatrix);
    }
    if (auto v = find(report, "verify")) {
        put("verify.S_plus_oracle", find(*v, "S_plus_oracle"), Shape::ComplexMatrix);
        put("verify.S_minus_inv_oracle", find(*v, "S_minus_inv_oracle"), Shape::ComplexMatrix);
        put("verify.max_diff_S_plus", find(*v, "max_diff_S_plus"), Shape::Real);
        put("verify.max_diff_S_minus_inv", find(*v, "max_diff_S_minus_inv"), Shape::Real);
    }
    return os.str();
}

}  // namespace mono::cli
