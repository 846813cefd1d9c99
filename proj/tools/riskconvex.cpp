#include "riskconvex/certify.hpp"
#include "riskconvex/errors.hpp"
#include "riskconvex/oracles.hpp"
#include "riskconvex/problem_io.hpp"
#include "riskconvex/stability.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace riskconvex;

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        if (!content.empty() && content.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ParseError("cannot open output file '" + out_path + "'");
    out << content;
}

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("RISKCONVEX_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

struct CommonArgs {
    std::string file;
    std::string out;
    std::uint64_t seed = 0; // 0 = keep the problem file's seed
    int threads = 0;
};

risk::RiskConfig effective_config(const io::ProblemFile& p, const CommonArgs& a) {
    risk::RiskConfig cfg = p.integration;
    if (a.seed != 0) cfg.seed = a.seed;
    cfg.threads = resolve_threads(a.threads > 0 ? a.threads : cfg.threads);
    return cfg;
}

int cmd_analyze(const CommonArgs& args) {
    const auto p = io::load_problem(args.file);
    const auto verts = poly::enumerate_dual_vertices(p.recourse);
    const auto cx = poly::build_cone_complex(verts);
    auto j = io::geometry_report(cx);
    j["phi_check"] = nlohmann::ordered_json::object();
    j["phi_check"]["a1_complete_recourse"] = poly::check_complete_recourse(p.recourse);
    const auto a2 = poly::check_sufficiently_expensive(p.recourse);
    j["phi_check"]["a2_strict_witness_slack"] = a2.delta;
    j["phi_check"]["a6_positive_costs"] = poly::check_a6(p.recourse);
    write_output(args.out, j.dump(2));
    return 0;
}

int cmd_certify(const CommonArgs& args, double alpha_flag, double eta0_override,
                const std::string& checks, bool min_delta) {
    const auto p = io::load_problem(args.file);
    if (!p.certificate || !p.region)
        throw ParseError("certificate: required for the certify subcommand");
    certify::CertifyOptions opts;
    opts.alpha = alpha_flag > 0.0 ? alpha_flag : p.risk_section.alpha;
    opts.distortion = p.risk_section.distortion;
    opts.use_min_delta = min_delta;
    auto rep = certify::certify_pipeline(p.recourse, p.measure, *p.certificate, *p.region,
                                         effective_config(p, args), opts);
    if (eta0_override > 0.0 && rep.eta0) rep.eta0 = eta0_override;
    auto j = io::certification_report_json(rep);

    bool pass = true;
    if (checks.empty()) {
        pass = rep.all_requested_pass;
    } else {
        std::stringstream ss(checks);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item == "a1") pass = pass && rep.a1.pass;
            else if (item == "a2") pass = pass && rep.a2.pass;
            else if (item == "a3") pass = pass && rep.a3.pass;
            else if (item == "a4") pass = pass && rep.a4.pass;
            else if (item == "a5") pass = pass && rep.a5.pass;
            else if (item == "a6") pass = pass && rep.a6.pass;
            else if (item == "cvar_condition") pass = pass && rep.cvar_condition && rep.cvar_condition->pass;
            else throw ParseError("--checks: unknown check '" + item + "'");
        }
    }
    write_output(args.out, j.dump(2));
    return pass ? 0 : 2;
}

int cmd_evaluate(const CommonArgs& args, const std::string& functional_flag, const std::string& grid,
                 double alpha_flag, double eta_flag, const std::string& fix) {
    const auto p = io::load_problem(args.file);
    const auto cx = poly::build_cone_complex(poly::enumerate_dual_vertices(p.recourse));
    risk::Evaluator ev(cx, p.measure, effective_config(p, args));

    const std::string functional = functional_flag.empty() ? p.risk_section.functional : functional_flag;
    const double alpha = alpha_flag > 0.0 ? alpha_flag : p.risk_section.alpha;
    const double eta = eta_flag >= 0.0 ? eta_flag : p.risk_section.eta;

    double glo = 0.0, ghi = 1.0;
    int gn = 21;
    {
        std::stringstream ss(grid);
        std::string tok;
        std::vector<std::string> toks;
        while (std::getline(ss, tok, ':')) toks.push_back(tok);
        if (toks.size() != 3) throw ParseError("--grid: expected lo:hi:count");
        glo = std::stod(toks[0]);
        ghi = std::stod(toks[1]);
        gn = std::stoi(toks[2]);
        if (gn < 1) throw ParseError("--grid: count must be >= 1");
    }
    Eigen::VectorXd x = Eigen::VectorXd::Zero(p.measure.dim);
    {
        Eigen::VectorXd slo, shi;
        p.measure.support_box(slo, shi);
        x = 0.5 * (slo + shi);
        if (!fix.empty()) {
            std::stringstream ss(fix);
            std::string tok;
            int k = 1;
            while (std::getline(ss, tok, ',') && k < p.measure.dim) x[k++] = std::stod(tok);
        }
    }

    std::ostringstream csv;
    csv << "x";
    for (int k = 1; k < p.measure.dim; ++k) csv << ",x" << k + 1;
    csv << ",eta_or_alpha,functional,value,stderr\n";
    for (int i = 0; i < gn; ++i) {
        x[0] = gn == 1 ? glo : glo + (ghi - glo) * i / (gn - 1.0);
        risk::Estimate e;
        double param = 0.0;
        if (functional == "expectation") {
            e = ev.q_expectation(x);
        } else if (functional == "expected_excess") {
            e = ev.q_expected_excess(x, eta);
            param = eta;
        } else if (functional == "var") {
            e = {ev.q_var(x, alpha), 0.0};
            param = alpha;
        } else if (functional == "cvar") {
            e = ev.q_cvar(x, alpha);
            param = alpha;
        } else if (functional == "distortion") {
            if (!p.risk_section.distortion)
                throw ParseError("risk.distortion: required for the distortion functional");
            e = ev.q_distortion(x, *p.risk_section.distortion);
            param = alpha;
        } else {
            throw ParseError("--functional: unknown '" + functional + "'");
        }
        for (int k = 0; k < p.measure.dim; ++k) csv << (k ? "," : "") << io::format_double(x[k]);
        csv << "," << io::format_double(param) << "," << functional << ","
            << io::format_double(e.value) << "," << io::format_double(e.stderr_) << "\n";
    }
    write_output(args.out, csv.str());
    return 0;
}

int cmd_stability(const CommonArgs& args, const std::string& radii_csv, int reps, double kappa,
                  std::size_t n_scen, double p_order, const std::string& family_name,
                  const std::string& summary_path) {
    const auto p = io::load_problem(args.file);
    if (!p.first_stage) throw ParseError("first_stage: required for the stability subcommand");
    if (!p.risk_section.distortion)
        throw ParseError("risk.distortion: required for the stability subcommand");
    const auto cx = poly::build_cone_complex(poly::enumerate_dual_vertices(p.recourse));

    std::vector<double> radii;
    {
        std::stringstream ss(radii_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) radii.push_back(std::stod(tok));
        if (radii.empty()) throw ParseError("--radii: expected a comma-separated list");
    }
    stability::PerturbationFamily family = stability::PerturbationFamily::Shift;
    if (family_name == "reweight") family = stability::PerturbationFamily::Reweight;
    else if (family_name == "resample") family = stability::PerturbationFamily::Resample;
    else if (family_name != "shift") throw ParseError("--family: unknown '" + family_name + "'");

    const auto cfg = effective_config(p, args);
    const auto res = stability::stability_experiment(*p.first_stage, cx, *p.risk_section.distortion,
                                                     p.measure, radii, n_scen, reps, cfg.seed, kappa,
                                                     p_order, family, cfg.alpha_cells);
    std::ostringstream csv;
    csv << "radius,rep,d_p,drift,bound,pass,unique\n";
    for (const auto& row : res.rows) {
        csv << io::format_double(row.radius) << "," << row.rep << "," << io::format_double(row.d_p)
            << "," << io::format_double(row.drift) << "," << io::format_double(row.bound) << ","
            << (row.pass ? "true" : "false") << "," << (row.unique ? "true" : "false") << "\n";
    }
    write_output(args.out, csv.str());
    nlohmann::ordered_json j;
    j["loglog_slope"] = res.loglog_slope;
    j["violations"] = res.violations;
    j["lipschitz_L"] = res.lipschitz_L;
    j["max_vertex_norm"] = res.max_vertex_norm;
    j["kappa"] = res.kappa;
    j["rows"] = res.rows.size();
    if (!summary_path.empty()) {
        write_output(summary_path, j.dump(2));
    } else {
        std::cerr << j.dump(2) << "\n";
    }
    return res.violations == 0 ? 0 : 2;
}

int cmd_examples(const CommonArgs& args) {
    const std::uint64_t seed = args.seed != 0 ? args.seed : 12345;
    const auto res = oracles::run_oracle_suite(seed);
    nlohmann::ordered_json j;
    j["seed"] = seed;
    j["cases"] = nlohmann::ordered_json::array();
    std::ostringstream table;
    for (const auto& c : res.cases) {
        table << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  max_err="
              << io::format_double(c.max_err) << "  tol=" << io::format_double(c.tol) << "\n";
        nlohmann::ordered_json cj;
        cj["name"] = c.name;
        cj["max_err"] = c.max_err;
        cj["tol"] = c.tol;
        cj["pass"] = c.pass;
        j["cases"].push_back(cj);
    }
    j["all_pass"] = res.all_pass;
    std::cout << table.str();
    if (!args.out.empty()) write_output(args.out, j.dump(2));
    return res.all_pass ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"riskconvex: polyhedral analysis and strong-convexity certification for "
                 "risk-averse two-stage linear recourse models"};
    app.require_subcommand(1);

    CommonArgs args;
    double alpha_flag = -1.0, eta_flag = -1.0, eta0_override = -1.0, kappa = 0.0, p_order = 1.0;
    std::string grid = "0.05:0.95:19", checks, fix, radii = "0.005,0.01,0.02,0.04,0.08,0.16,0.32,0.64";
    std::string family = "shift", summary;
    int reps = 5;
    std::size_t n_scen = 300;
    bool min_delta = false;

    auto add_common = [&](CLI::App* sub, bool needs_file) {
        if (needs_file) sub->add_option("file", args.file, "problem JSON file")->required();
        sub->add_option("--out", args.out, "output path (default: stdout)");
        sub->add_option("--seed", args.seed, "override the integration seed");
        sub->add_option("--threads", args.threads, "worker threads (env RISKCONVEX_THREADS)");
    };

    auto* analyze = app.add_subcommand("analyze", "polyhedral geometry report");
    add_common(analyze, true);

    auto* certify = app.add_subcommand("certify", "assumption checks and convexity certification");
    add_common(certify, true);
    certify->add_option("--alpha", alpha_flag, "CVaR confidence level");
    certify->add_option("--eta0-override", eta0_override, "replace the computed eta0 in the report");
    certify->add_option("--checks", checks, "comma list of checks gating the exit code");
    certify->add_flag("--min-delta", min_delta, "use the min variant of the Omega constant");

    auto* evaluate = app.add_subcommand("evaluate", "risk functional curves as CSV");
    add_common(evaluate, true);
    std::string functional_flag;
    evaluate->add_option("--functional", functional_flag, "functional override");
    evaluate->add_option("--grid", grid, "first-coordinate grid lo:hi:count");
    evaluate->add_option("--alpha", alpha_flag, "confidence level");
    evaluate->add_option("--eta", eta_flag, "excess threshold");
    evaluate->add_option("--fix", fix, "fixed values for coordinates 2..s (comma list)");

    auto* stability = app.add_subcommand("stability", "measure-perturbation experiments");
    add_common(stability, true);
    stability->add_option("--radii", radii, "comma list of perturbation radii");
    stability->add_option("--reps", reps, "replications per radius");
    stability->add_option("--kappa", kappa, "certified strong-convexity modulus")->required();
    stability->add_option("--scenarios", n_scen, "scenario count per replication");
    stability->add_option("--p", p_order, "Wasserstein order");
    stability->add_option("--family", family, "shift | reweight | resample");
    stability->add_option("--summary", summary, "write the JSON summary here");

    auto* examples = app.add_subcommand("examples", "oracle-vs-pipeline suite");
    add_common(examples, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return cmd_analyze(args);
        if (certify->parsed()) return cmd_certify(args, alpha_flag, eta0_override, checks, min_delta);
        if (evaluate->parsed()) return cmd_evaluate(args, functional_flag, grid, alpha_flag, eta_flag, fix);
        if (stability->parsed())
            return cmd_stability(args, radii, reps, kappa, n_scen, p_order, family, summary);
        if (examples->parsed()) return cmd_examples(args);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
