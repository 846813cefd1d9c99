#include "riskconvex/problem_io.hpp"

#include "riskconvex/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace riskconvex::io {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ParseError(path + ": " + what);
}

const json& need(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) fail(path + "." + key, "missing required key");
    return *it;
}

double need_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

Eigen::VectorXd parse_vector(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of numbers");
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) fail(path + "[" + std::to_string(i) + "]", "expected a number");
        v[static_cast<int>(i)] = j[i].get<double>();
    }
    return v;
}

Eigen::MatrixXd parse_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of rows");
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    if (cols == 0) fail(path + "[0]", "expected a nonempty row array");
    Eigen::MatrixXd m(j.size(), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            fail(path + "[" + std::to_string(r) + "]", "rows must have equal length");
        for (std::size_t c = 0; c < cols; ++c) {
            if (!j[r][c].is_number())
                fail(path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]", "expected a number");
            m(static_cast<int>(r), static_cast<int>(c)) = j[r][c].get<double>();
        }
    }
    return m;
}

// bounds: [[lo,hi], ...] per dimension.
void parse_bounds(const json& j, const std::string& path, Eigen::VectorXd& lo, Eigen::VectorXd& hi) {
    if (!j.is_array() || j.empty()) fail(path, "expected [[lo,hi], ...]");
    lo = Eigen::VectorXd(j.size());
    hi = Eigen::VectorXd(j.size());
    for (std::size_t k = 0; k < j.size(); ++k) {
        if (!j[k].is_array() || j[k].size() != 2)
            fail(path + "[" + std::to_string(k) + "]", "expected [lo, hi]");
        lo[static_cast<int>(k)] = need_number(j[k][0], path);
        hi[static_cast<int>(k)] = need_number(j[k][1], path);
    }
}

measures::MeasureModel parse_measure(const json& j, const std::string& base_dir) {
    const std::string kind = need(j, "kind", "measure").get<std::string>();
    if (kind == "box_uniform") {
        Eigen::VectorXd lo, hi;
        parse_bounds(need(j, "bounds", "measure"), "measure.bounds", lo, hi);
        return measures::MeasureModel::box_uniform(lo, hi);
    }
    if (kind == "mixture") {
        const auto& comps = need(j, "components", "measure");
        if (!comps.is_array() || comps.empty()) fail("measure.components", "expected a nonempty array");
        std::vector<measures::BoxUniform> boxes;
        for (std::size_t c = 0; c < comps.size(); ++c) {
            Eigen::VectorXd lo, hi;
            parse_bounds(need(comps[c], "bounds", "measure.components[" + std::to_string(c) + "]"),
                         "measure.components[" + std::to_string(c) + "].bounds", lo, hi);
            boxes.push_back({lo, hi});
        }
        const auto w = parse_vector(need(j, "weights", "measure"), "measure.weights");
        return measures::MeasureModel::mixture(std::move(boxes), w);
    }
    if (kind == "density_grid") {
        const auto& axes = need(j, "axes", "measure");
        if (!axes.is_array() || axes.empty()) fail("measure.axes", "expected a nonempty array");
        std::vector<std::vector<double>> ax;
        for (std::size_t k = 0; k < axes.size(); ++k) {
            const auto v = parse_vector(axes[k], "measure.axes[" + std::to_string(k) + "]");
            ax.emplace_back(v.data(), v.data() + v.size());
        }
        const auto vals = parse_vector(need(j, "values", "measure"), "measure.values");
        return measures::MeasureModel::density_grid(std::move(ax),
                                                    std::vector<double>(vals.data(), vals.data() + vals.size()));
    }
    if (kind == "empirical") {
        if (j.contains("csv")) {
            const bool wc = j.value("weight_column", false);
            return load_scenarios_csv(base_dir + "/" + j["csv"].get<std::string>(), wc);
        }
        const auto pts = parse_matrix(need(j, "points", "measure"), "measure.points");
        Eigen::VectorXd w;
        if (j.contains("weights")) w = parse_vector(j["weights"], "measure.weights");
        return measures::MeasureModel::empirical(pts, w);
    }
    fail("measure.kind", "unknown kind '" + kind + "'");
}

risk::DistortionFunction parse_distortion(const json& j, const std::string& path) {
    const std::string fam = need(j, "family", path).get<std::string>();
    if (fam == "tabulated") {
        const auto& kn = need(j, "knots", path);
        if (!kn.is_array() || kn.size() < 2) fail(path + ".knots", "expected at least two [t,g] pairs");
        std::vector<std::pair<double, double>> knots;
        for (const auto& row : kn) {
            if (!row.is_array() || row.size() != 2) fail(path + ".knots", "expected [t, g] pairs");
            knots.emplace_back(row[0].get<double>(), row[1].get<double>());
        }
        return risk::DistortionFunction::tabulated(std::move(knots));
    }
    double param = 0.0;
    if (fam != "expectation") param = need_number(need(j, "param", path), path + ".param");
    return risk::DistortionFunction::from_name(fam, param);
}

} // namespace

measures::MeasureModel load_scenarios_csv(const std::string& path, bool weight_column) {
    std::ifstream in(path);
    if (!in) throw ParseError("scenario csv: cannot open '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (...) {
                throw ParseError("scenario csv: non-numeric cell '" + cell + "'");
            }
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("scenario csv: no rows in '" + path + "'");
    const std::size_t cols = rows[0].size();
    for (const auto& r : rows)
        if (r.size() != cols) throw ParseError("scenario csv: ragged rows");
    const std::size_t dim = weight_column ? cols - 1 : cols;
    if (dim < 1) throw ParseError("scenario csv: need at least one coordinate column");
    Eigen::MatrixXd pts(rows.size(), dim);
    Eigen::VectorXd w = Eigen::VectorXd::Constant(rows.size(), 1.0 / static_cast<double>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t k = 0; k < dim; ++k) pts(static_cast<int>(i), static_cast<int>(k)) = rows[i][k];
        if (weight_column) w[static_cast<int>(i)] = rows[i][cols - 1];
    }
    if (weight_column) {
        const double sum = w.sum();
        if (sum <= 0.0) throw ParseError("scenario csv: weights must be positive");
        w /= sum;
    }
    return measures::MeasureModel::empirical(pts, w);
}

ProblemFile parse_problem(const json& j, const std::string& base_dir) {
    ProblemFile p;
    const auto& rec = need(j, "recourse", "problem");
    p.recourse.W = parse_matrix(need(rec, "W", "recourse"), "recourse.W");
    p.recourse.q = parse_vector(need(rec, "q", "recourse"), "recourse.q");
    p.recourse.validate();

    p.measure = parse_measure(need(j, "measure", "problem"), base_dir);
    if (p.measure.dim != p.recourse.s())
        fail("measure", "dimension " + std::to_string(p.measure.dim) +
                            " does not match recourse rows " + std::to_string(p.recourse.s()));

    if (j.contains("certificate")) {
        const auto& c = j["certificate"];
        measures::DensityCertificate cert;
        parse_bounds(need(c, "V", "certificate"), "certificate.V", cert.v_lo, cert.v_hi);
        cert.rho = need_number(need(c, "rho", "certificate"), "certificate.rho");
        cert.r = need_number(need(c, "r", "certificate"), "certificate.r");
        if (cert.v_lo.size() != p.recourse.s()) fail("certificate.V", "dimension mismatch");
        if (!(cert.rho > 0.0)) fail("certificate.rho", "must be positive");
        if (!(cert.r > 0.0)) fail("certificate.r", "must be positive");
        p.certificate = cert;
        certify::RegionSpec region;
        region.v_lo = cert.v_lo;
        region.v_hi = cert.v_hi;
        if (c.contains("U")) {
            Eigen::VectorXd ulo, uhi;
            parse_bounds(c["U"], "certificate.U", ulo, uhi);
            region.u_box = std::make_pair(ulo, uhi);
        }
        region.validate();
        p.region = region;
    }

    if (j.contains("risk")) {
        const auto& r = j["risk"];
        p.risk_section.functional = need(r, "functional", "risk").get<std::string>();
        const std::string& f = p.risk_section.functional;
        if (f != "expectation" && f != "expected_excess" && f != "var" && f != "cvar" &&
            f != "distortion")
            fail("risk.functional", "unknown functional '" + f + "'");
        if (r.contains("alpha")) p.risk_section.alpha = need_number(r["alpha"], "risk.alpha");
        if (r.contains("eta")) p.risk_section.eta = need_number(r["eta"], "risk.eta");
        if (r.contains("distortion"))
            p.risk_section.distortion = parse_distortion(r["distortion"], "risk.distortion");
        if (f == "distortion" && !p.risk_section.distortion)
            fail("risk.distortion", "required for the distortion functional");
    }

    if (j.contains("first_stage")) {
        const auto& fsj = j["first_stage"];
        stability::FirstStageSpec fs;
        if (fsj.contains("box")) {
            Eigen::VectorXd lo, hi;
            parse_bounds(fsj["box"], "first_stage.box", lo, hi);
            fs = stability::FirstStageSpec::box(lo, hi);
            if (fsj.contains("T")) fs.T = parse_matrix(fsj["T"], "first_stage.T");
            if (fsj.contains("h")) fs.h = parse_vector(fsj["h"], "first_stage.h");
        } else {
            fs.T = parse_matrix(need(fsj, "T", "first_stage"), "first_stage.T");
            fs.A = parse_matrix(need(fsj, "A", "first_stage"), "first_stage.A");
            fs.b = parse_vector(need(fsj, "b", "first_stage"), "first_stage.b");
            fs.h = parse_vector(need(fsj, "h", "first_stage"), "first_stage.h");
        }
        if (fs.s() != p.recourse.s()) fail("first_stage.T", "row count must match the recourse dimension");
        fs.validate();
        p.first_stage = fs;
    }

    if (j.contains("integration")) {
        const auto& ij = j["integration"];
        if (ij.contains("mode")) {
            const std::string mode = ij["mode"].get<std::string>();
            if (mode == "mc" || mode == "monte_carlo") {
                p.integration.mode = risk::IntegrationMode::MonteCarlo;
            } else if (mode == "quadrature" || mode == "exact") {
                p.integration.mode = risk::IntegrationMode::Quadrature;
            } else {
                fail("integration.mode", "unknown mode '" + mode + "'");
            }
        }
        if (ij.contains("n_samples"))
            p.integration.n_samples = static_cast<std::size_t>(need_number(ij["n_samples"], "integration.n_samples"));
        if (ij.contains("replicates"))
            p.integration.replicates = static_cast<int>(need_number(ij["replicates"], "integration.replicates"));
        if (ij.contains("seed"))
            p.integration.seed = static_cast<std::uint64_t>(need_number(ij["seed"], "integration.seed"));
        if (ij.contains("alpha_grid"))
            p.integration.alpha_cells = static_cast<int>(need_number(ij["alpha_grid"], "integration.alpha_grid"));
        if (ij.contains("threads"))
            p.integration.threads = static_cast<int>(need_number(ij["threads"], "integration.threads"));
    }
    return p;
}

ProblemFile load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("problem file: cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError("problem file: invalid JSON: " + std::string(e.what()));
    }
    std::string dir = ".";
    const auto slash = path.find_last_of('/');
    if (slash != std::string::npos) dir = path.substr(0, slash);
    return parse_problem(j, dir);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

nlohmann::ordered_json vec_json(const Eigen::VectorXd& v) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

} // namespace

nlohmann::ordered_json geometry_report(const poly::ConeComplex& cx) {
    nlohmann::ordered_json j;
    j["dimension"] = cx.dim;
    j["vertex_count"] = cx.num_vertices();
    j["vertices"] = nlohmann::ordered_json::array();
    for (const auto& v : cx.vertices) j["vertices"].push_back(vec_json(v));
    j["cones"] = nlohmann::ordered_json::array();
    for (int i = 0; i < cx.num_vertices(); ++i) {
        const auto& c = cx.cones[i];
        nlohmann::ordered_json cj;
        cj["index"] = i;
        cj["rays"] = nlohmann::ordered_json::array();
        for (const auto& t : c.rays) cj["rays"].push_back(vec_json(t));
        cj["facets"] = nlohmann::ordered_json::array();
        for (const auto& f : c.facets) {
            nlohmann::ordered_json fj;
            fj["normal"] = vec_json(f.normal);
            fj["opposite_vertex"] = f.opposite_vertex;
            fj["ray_ids"] = f.ray_ids;
            cj["facets"].push_back(fj);
        }
        cj["in_iplus"] = c.in_iplus;
        cj["in_iplusplus"] = c.in_iplusplus;
        cj["in_ipm"] = c.in_ipm;
        if (c.in_iplus) {
            cj["yhat1_norm"] = c.yhat1_norm;
            cj["yhat1_ray"] = c.yhat1_ray;
            cj["gamma"] = c.gamma;
            cj["gamma_prime"] = c.gamma_prime;
        }
        if (c.in_iplusplus) cj["alpha_prime"] = c.alpha_prime;
        j["cones"].push_back(cj);
    }
    j["adjacency"] = nlohmann::ordered_json::array();
    for (auto [a, b] : cx.adjacency) j["adjacency"].push_back(nlohmann::ordered_json::array({a, b}));
    j["iplus"] = cx.iplus;
    j["iplusplus"] = cx.iplusplus;
    j["ipm"] = cx.ipm;
    j["alpha"] = cx.alpha;
    j["delta"] = cx.delta;
    j["delta_min_variant"] = cx.delta_min;
    return j;
}

namespace {

nlohmann::ordered_json check_json(const certify::CheckResult& c) {
    nlohmann::ordered_json j;
    j["pass"] = c.pass;
    j["value"] = c.value;
    j["evidence"] = c.evidence;
    return j;
}

nlohmann::ordered_json modulus_json(const certify::ModulusEstimate& m) {
    nlohmann::ordered_json j;
    j["kappa"] = m.kappa;
    j["noise_floor"] = m.noise_floor;
    j["pairs_used"] = m.pairs_used;
    j["certified_positive"] = m.certified_positive();
    return j;
}

} // namespace

nlohmann::ordered_json certification_report_json(const certify::CertificationReport& rep) {
    nlohmann::ordered_json j;
    j["a1_complete_recourse"] = check_json(rep.a1);
    j["a2_sufficiently_expensive"] = check_json(rep.a2);
    j["a3_first_moment"] = check_json(rep.a3);
    j["a4_density_floor"] = check_json(rep.a4);
    j["a5_eta0"] = check_json(rep.a5);
    j["a6_positive_costs"] = check_json(rep.a6);
    if (rep.eta0) {
        j["eta0"] = *rep.eta0;
    } else {
        j["eta0"] = nullptr;
    }
    j["rho_used"] = rep.rho_used;
    j["r_used"] = rep.r_used;
    if (rep.cvar_condition) {
        nlohmann::ordered_json c;
        c["sup_var_estimate"] = rep.cvar_condition->sup_estimate;
        c["eta0"] = rep.cvar_condition->eta0;
        c["margin"] = rep.cvar_condition->margin;
        c["pass"] = rep.cvar_condition->pass;
        c["grid_spacing"] = rep.cvar_condition->grid_spacing;
        c["lipschitz_var_pass"] = rep.cvar_condition->lipschitz_var_pass;
        c["lipschitz_var_worst"] = rep.cvar_condition->lipschitz_var_worst;
        j["cvar_condition"] = c;
    }
    if (rep.var_bound) {
        nlohmann::ordered_json v;
        v["eta_bar"] = rep.var_bound->eta_bar;
        v["d"] = rep.var_bound->d;
        v["bound"] = rep.var_bound->bound;
        v["u_lo"] = vec_json(rep.var_bound->u_lo);
        v["u_hi"] = vec_json(rep.var_bound->u_hi);
        j["var_upper_bound"] = v;
    }
    nlohmann::ordered_json k;
    if (rep.kappa_cvar) k["cvar"] = modulus_json(*rep.kappa_cvar);
    if (rep.kappa_qee_fixed_eta) k["qee_fixed_eta"] = modulus_json(*rep.kappa_qee_fixed_eta);
    if (rep.kappa_partial) {
        k["partial_midpoint"] = modulus_json(rep.kappa_partial->midpoint);
        k["partial_gradient"] = modulus_json(rep.kappa_partial->gradient);
    }
    if (rep.kappa_restricted) {
        k["restricted_midpoint"] = modulus_json(rep.kappa_restricted->midpoint);
        k["restricted_gradient"] = modulus_json(rep.kappa_restricted->gradient);
    }
    j["kappa_empirical"] = k;
    if (rep.distortion_c) j["distortion_condition_c"] = *rep.distortion_c;
    if (rep.theoretical) {
        nlohmann::ordered_json t;
        t["kappa_lower"] = rep.theoretical->kappa_lower;
        t["ci_half"] = rep.theoretical->ci_half;
        t["eta_minus"] = rep.theoretical->eta_minus;
        t["eta_plus"] = rep.theoretical->eta_plus;
        t["notes"] = rep.theoretical->notes;
        j["theoretical_modulus"] = t;
    }
    j["omega_delta"] = rep.omega_delta;
    j["all_requested_pass"] = rep.all_requested_pass;
    return j;
}

} // namespace riskconvex::io
