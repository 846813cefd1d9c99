#include "riskconvex/certify.hpp"

#include "riskconvex/errors.hpp"
#include "riskconvex/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace riskconvex::certify {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd draw_point(Rng& rng, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    Eigen::VectorXd x(lo.size());
    for (int k = 0; k < lo.size(); ++k) x[k] = rng.uniform(lo[k], hi[k]);
    return x;
}
} // namespace

void RegionSpec::validate() const {
    if (v_lo.size() != v_hi.size() || v_lo.size() == 0) throw ParseError("region: bad box");
    for (int k = 0; k < v_lo.size(); ++k)
        if (!(v_lo[k] < v_hi[k])) throw ParseError("region: lo must be < hi");
    if (u_box) {
        const auto& [ulo, uhi] = *u_box;
        if (ulo.size() != v_lo.size()) throw ParseError("region.U: wrong dimension");
        for (int k = 0; k < v_lo.size(); ++k)
            if (ulo[k] < v_lo[k] - 1e-12 || uhi[k] > v_hi[k] + 1e-12 || !(ulo[k] < uhi[k]))
                throw ParseError("region.U: must be a sub-box of V");
    }
}

double region_gap(const Eigen::VectorXd& v_lo, const Eigen::VectorXd& v_hi,
                  const Eigen::VectorXd& u_lo, const Eigen::VectorXd& u_hi) {
    double gap = kInf;
    for (int k = 0; k < v_lo.size(); ++k) {
        gap = std::min(gap, u_lo[k] - v_lo[k]);
        gap = std::min(gap, v_hi[k] - u_hi[k]);
    }
    return std::max(0.0, gap);
}

double eta0_max(const poly::ConeComplex& cx, double rho, double margin) {
    if (!(rho > 0.0)) throw ParseError("eta0_max: rho must be positive");
    double worst = 0.0;
    for (int i : cx.iplus) worst = std::max(worst, cx.cones[i].yhat1_norm);
    if (worst <= 0.0) return kInf; // I+ empty: A5 holds vacuously for any eta0
    return (1.0 - margin) * rho / worst;
}

CvarConditionResult cvar_condition_check(const risk::Evaluator& ev, const Eigen::VectorXd& lo,
                                         const Eigen::VectorXd& hi, double alpha, double eta0,
                                         double delta, int grid_per_dim) {
    const int s = static_cast<int>(lo.size());
    const int g = s <= 3 ? grid_per_dim : std::max(3, static_cast<int>(std::round(std::pow(8000.0, 1.0 / s))));
    CvarConditionResult out;
    out.eta0 = eta0;

    std::vector<Eigen::VectorXd> pts;
    std::vector<int> idx(s, 0);
    while (true) {
        Eigen::VectorXd x(s);
        for (int k = 0; k < s; ++k)
            x[k] = lo[k] + (hi[k] - lo[k]) * (idx[k] + 0.5) / static_cast<double>(g);
        pts.push_back(x);
        int k = s - 1;
        while (k >= 0 && ++idx[k] == g) idx[k--] = 0;
        if (k < 0) break;
    }
    std::vector<double> vars(pts.size());
    double best = -kInf;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        vars[i] = ev.q_var(pts[i], alpha);
        if (vars[i] > best) {
            best = vars[i];
            best_i = i;
        }
    }
    double spacing = 0.0;
    for (int k = 0; k < s; ++k) spacing = std::max(spacing, (hi[k] - lo[k]) / g);

    // One refinement pass around the maximizer.
    {
        Eigen::VectorXd rlo = pts[best_i], rhi = pts[best_i];
        for (int k = 0; k < s; ++k) {
            rlo[k] = std::max(lo[k], rlo[k] - spacing);
            rhi[k] = std::min(hi[k], rhi[k] + spacing);
        }
        std::vector<int> ridx(s, 0);
        const int rg = 10;
        while (true) {
            Eigen::VectorXd x(s);
            for (int k = 0; k < s; ++k)
                x[k] = rlo[k] + (rhi[k] - rlo[k]) * (ridx[k] + 0.5) / rg;
            best = std::max(best, ev.q_var(x, alpha));
            int k = s - 1;
            while (k >= 0 && ++ridx[k] == rg) ridx[k--] = 0;
            if (k < 0) break;
        }
    }

    out.sup_estimate = best;
    out.arg_sup = pts[best_i];
    out.margin = eta0 - best;
    out.pass = best <= eta0;
    out.grid_spacing = spacing;

    // VaR Lipschitz diagnostic |VaR(y) - VaR(x)| <= (delta/3)||y - x|| on the
    // same grid, with a sampling-noise allowance on Monte-Carlo paths.
    double slack = 1e-9;
    if (!ev.exact_path()) {
        const auto [plo, phi_hi] = ev.phi_range(pts[best_i]);
        slack = 3.0 * (phi_hi - plo) / std::sqrt(static_cast<double>(ev.total_samples()));
    }
    double worst = -kInf;
    const std::size_t stride = pts.size() > 650 ? pts.size() / 650 + 1 : 1;
    for (std::size_t i = 0; i < pts.size(); i += stride) {
        for (std::size_t j = i + 1; j < pts.size(); j += stride) {
            const double lhs = std::abs(vars[i] - vars[j]);
            const double rhs = delta / 3.0 * (pts[i] - pts[j]).norm();
            worst = std::max(worst, lhs - rhs);
        }
    }
    out.lipschitz_var_worst = worst;
    out.lipschitz_var_pass = worst <= slack;
    return out;
}

VarUpperBoundResult var_upper_bound(const poly::ConeComplex& cx, const measures::MeasureModel& m,
                                    const Eigen::VectorXd& u_lo, const Eigen::VectorXd& u_hi,
                                    double alpha, double eps) {
    VarUpperBoundResult out;
    out.d = cx.max_vertex_norm();

    Eigen::VectorXd slo, shi;
    m.support_box(slo, shi);
    double tmax = 0.0;
    for (int corner = 0; corner < (1 << m.dim); ++corner) {
        Eigen::VectorXd z(m.dim);
        for (int k = 0; k < m.dim; ++k) z[k] = (corner >> k) & 1 ? shi[k] : slo[k];
        tmax = std::max(tmax, z.norm());
    }
    double lo = 0.0, hi = tmax;
    if (measures::ball_mass(m, 0.0) >= alpha) {
        out.eta_bar = 0.0;
    } else {
        for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + hi); ++it) {
            const double mid = 0.5 * (lo + hi);
            if (measures::ball_mass(m, mid) >= alpha - 1e-13) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.eta_bar = hi;
    }

    double umax = 0.0;
    for (int corner = 0; corner < (1 << u_lo.size()); ++corner) {
        Eigen::VectorXd z(u_lo.size());
        for (int k = 0; k < u_lo.size(); ++k) z[k] = (corner >> k) & 1 ? u_hi[k] : u_lo[k];
        umax = std::max(umax, z.norm());
    }
    out.bound = out.d * out.eta_bar + out.d * umax;

    const double half = eps / out.d / std::sqrt(static_cast<double>(u_lo.size()));
    out.u_lo = Eigen::VectorXd::Constant(u_lo.size(), -half);
    out.u_hi = Eigen::VectorXd::Constant(u_lo.size(), half);
    return out;
}

namespace {

struct PairSample {
    Eigen::VectorXd x1, x2;
    double eta1 = 0.0, eta2 = 0.0;
    double lambda = 0.5;
};

ModulusEstimate finalize(const std::vector<double>& kappas, const std::vector<double>& ses) {
    ModulusEstimate out;
    out.pairs_used = static_cast<int>(kappas.size());
    if (kappas.empty()) return out;
    std::size_t arg = 0;
    for (std::size_t i = 1; i < kappas.size(); ++i)
        if (kappas[i] < kappas[arg]) arg = i;
    out.kappa = kappas[arg];
    out.noise_floor = 3.0 * ses[arg];
    return out;
}

} // namespace

ModulusEstimate empirical_strong_convexity(const RepFunctional& f, const Eigen::VectorXd& lo,
                                           const Eigen::VectorXd& hi, const EstimatorConfig& cfg) {
    Rng rng(cfg.seed);
    const double diam = (hi - lo).norm();
    std::vector<double> kappas, ses;
    for (int p = 0; p < cfg.n_pairs; ++p) {
        Eigen::VectorXd x = draw_point(rng, lo, hi);
        Eigen::VectorXd y = draw_point(rng, lo, hi);
        for (int tries = 0; (y - x).norm() < cfg.min_separation * diam && tries < 1000; ++tries)
            y = draw_point(rng, lo, hi);
        const double lambda = rng.uniform(cfg.lambda_lo, cfg.lambda_hi);
        const Eigen::VectorXd mid = lambda * x + (1.0 - lambda) * y;
        const double denom =
            std::max(cfg.denom_floor, lambda * (1.0 - lambda) * (x - y).squaredNorm());
        std::vector<double> gaps(f.replicates);
        for (int r = 0; r < f.replicates; ++r)
            gaps[r] = lambda * f.eval(r, x) + (1.0 - lambda) * f.eval(r, y) - f.eval(r, mid);
        double mean = 0.0;
        for (double gv : gaps) mean += gv;
        mean /= f.replicates;
        double se = 0.0;
        if (f.replicates > 1) {
            double ss = 0.0;
            for (double gv : gaps) ss += (gv - mean) * (gv - mean);
            se = std::sqrt(ss / (f.replicates - 1.0) / f.replicates);
        }
        kappas.push_back(2.0 * mean / denom);
        ses.push_back(2.0 * se / denom);
    }
    return finalize(kappas, ses);
}

namespace {

std::vector<PairSample> draw_joint_pairs(Rng& rng, const Eigen::VectorXd& v_lo,
                                         const Eigen::VectorXd& v_hi, double eta_lo, double eta_hi,
                                         const EstimatorConfig& cfg, int count,
                                         const OmegaSet* omega, int max_attempts) {
    const double diam = (v_hi - v_lo).norm();
    std::vector<PairSample> pairs;
    int attempts = 0;
    while (static_cast<int>(pairs.size()) < count && attempts < max_attempts) {
        ++attempts;
        PairSample ps;
        ps.x1 = draw_point(rng, v_lo, v_hi);
        ps.x2 = draw_point(rng, v_lo, v_hi);
        ps.eta1 = rng.uniform(eta_lo, eta_hi);
        ps.eta2 = rng.uniform(eta_lo, eta_hi);
        ps.lambda = rng.uniform(cfg.lambda_lo, cfg.lambda_hi);
        if ((ps.x1 - ps.x2).norm() < cfg.min_separation * diam) continue;
        if (omega && !omega->pair_admissible(ps.x1, ps.eta1, ps.x2, ps.eta2)) continue;
        pairs.push_back(std::move(ps));
    }
    return pairs;
}

PartialScEstimate partial_sc_on_pairs(const risk::Evaluator& ev, const std::vector<PairSample>& pairs,
                                      const EstimatorConfig& cfg) {
    const int R = ev.replicate_count();
    std::vector<double> mid_k, mid_se, grad_k, grad_se;
    for (const auto& ps : pairs) {
        const double denom = std::max(cfg.denom_floor, (ps.x1 - ps.x2).squaredNorm());
        // Midpoint form (Definition 1, x-distance normalization only).
        {
            const Eigen::VectorXd xm = ps.lambda * ps.x1 + (1.0 - ps.lambda) * ps.x2;
            const double etam = ps.lambda * ps.eta1 + (1.0 - ps.lambda) * ps.eta2;
            std::vector<double> gaps(R);
            for (int r = 0; r < R; ++r)
                gaps[r] = ps.lambda * ev.expected_excess_rep(r, ps.x1, ps.eta1) +
                          (1.0 - ps.lambda) * ev.expected_excess_rep(r, ps.x2, ps.eta2) -
                          ev.expected_excess_rep(r, xm, etam);
            double mean = 0.0;
            for (double gv : gaps) mean += gv;
            mean /= R;
            double se = 0.0;
            if (R > 1) {
                double ss = 0.0;
                for (double gv : gaps) ss += (gv - mean) * (gv - mean);
                se = std::sqrt(ss / (R - 1.0) / R);
            }
            const double scale = ps.lambda * (1.0 - ps.lambda) * denom;
            mid_k.push_back(2.0 * mean / scale);
            mid_se.push_back(2.0 * se / scale);
        }
        // Gradient-monotonicity form.
        {
            const Eigen::VectorXd du = ps.x2 - ps.x1;
            const double dnu = ps.eta2 - ps.eta1;
            std::vector<double> quot(R);
            for (int r = 0; r < R; ++r) {
                const auto g1 = ev.gradient_rep(r, ps.x1, ps.eta1);
                const auto g2 = ev.gradient_rep(r, ps.x2, ps.eta2);
                quot[r] = ((g2.grad_x - g1.grad_x).dot(du) + (g2.d_eta - g1.d_eta) * dnu) / denom;
            }
            double mean = 0.0;
            for (double qv : quot) mean += qv;
            mean /= R;
            double se = 0.0;
            if (R > 1) {
                double ss = 0.0;
                for (double qv : quot) ss += (qv - mean) * (qv - mean);
                se = std::sqrt(ss / (R - 1.0) / R);
            }
            grad_k.push_back(mean);
            grad_se.push_back(se);
        }
    }
    PartialScEstimate out;
    out.midpoint = finalize(mid_k, mid_se);
    out.gradient = finalize(grad_k, grad_se);
    return out;
}

} // namespace

PartialScEstimate empirical_partial_sc(const risk::Evaluator& ev, const Eigen::VectorXd& v_lo,
                                       const Eigen::VectorXd& v_hi, double eta_lo, double eta_hi,
                                       const EstimatorConfig& cfg) {
    Rng rng(cfg.seed);
    const auto pairs =
        draw_joint_pairs(rng, v_lo, v_hi, eta_lo, eta_hi, cfg, cfg.n_pairs, nullptr, 200 * cfg.n_pairs);
    return partial_sc_on_pairs(ev, pairs, cfg);
}

bool OmegaSet::pair_admissible(const Eigen::VectorXd& x, double eta, const Eigen::VectorXd& y,
                               double eta_prime) const {
    auto ordered_ok = [&](const Eigen::VectorXd& from, double eta_from, const Eigen::VectorXd& to,
                          double eta_to) {
        const Eigen::VectorXd dir = to - from;
        const double nrm = dir.norm();
        if (nrm < 1e-15) return true;
        const double phiv = cx->phi(dir);
        bool triggered = false;
        for (int i : cx->iplus) {
            if (std::abs(cx->vertices[i].dot(dir) - phiv) <= 1e-9 * (1.0 + std::abs(phiv))) {
                triggered = true;
                break;
            }
        }
        if (!triggered) return true;
        return eta_to - eta_from >= -(delta / 3.0) * nrm - 1e-12;
    };
    return ordered_ok(x, eta, y, eta_prime) && ordered_ok(y, eta_prime, x, eta);
}

OmegaSet omega_set(const poly::ConeComplex& cx, double delta_override) {
    OmegaSet o;
    o.cx = &cx;
    o.delta = delta_override > 0.0 ? delta_override : cx.delta;
    return o;
}

PartialScEstimate empirical_restricted_psc(const risk::Evaluator& ev, const Eigen::VectorXd& v_lo,
                                           const Eigen::VectorXd& v_hi, double eta0,
                                           const OmegaSet& omega, const EstimatorConfig& cfg) {
    Rng rng(cfg.seed);
    const double eta_lo = eta0 / 20.0;
    const auto pairs =
        draw_joint_pairs(rng, v_lo, v_hi, eta_lo, eta0, cfg, cfg.n_pairs, &omega, 500 * cfg.n_pairs);
    if (static_cast<int>(pairs.size()) < std::min(cfg.n_pairs, 100))
        throw TooFewAdmissiblePairs("only " + std::to_string(pairs.size()) +
                                    " admissible pairs found");
    return partial_sc_on_pairs(ev, pairs, cfg);
}

// ---------------------------------------------------------------------------
// Theoretical modulus from the facet-sweep constants.

namespace {

// Orthonormal basis of the span of the given (row) directions, rank-checked.
Eigen::MatrixXd orthonormal_span(const std::vector<Eigen::VectorXd>& dirs, int want_rank) {
    const int s = static_cast<int>(dirs[0].size());
    Eigen::MatrixXd M(s, static_cast<int>(dirs.size()));
    for (std::size_t k = 0; k < dirs.size(); ++k) M.col(static_cast<int>(k)) = dirs[k];
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
    qr.setThreshold(1e-10);
    if (qr.rank() < want_rank) return Eigen::MatrixXd();
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(s, want_rank);
    return Q;
}

struct FacetVolume {
    double value = 0.0;
    double se = 0.0;
};

} // namespace

TheoreticalModulusResult theoretical_modulus(const poly::ConeComplex& cx, double rho, double r,
                                             double eta_minus, double eta_plus, std::size_t n_mc,
                                             std::uint64_t seed) {
    const int s = cx.dim;
    if (s > 3) throw DimensionTooHigh("theoretical modulus supports dim <= 3");
    if (cx.iplus.empty()) throw NumericalFailure("theoretical modulus needs I+ nonempty");
    TheoreticalModulusResult out;
    out.eta_minus = eta_minus;
    out.eta_plus = eta_plus;
    Rng rng(seed);

    double kappa = kInf;
    double ci_at_min = 0.0;

    auto facet_volume = [&](const Eigen::MatrixXd& basis, const Eigen::VectorXd& center,
                            const Eigen::MatrixXd& coneA, const Eigen::VectorXd* level_dir,
                            double level, double radius, std::size_t n) {
        FacetVolume fv;
        if (s == 1) {
            fv.value = 1.0; // counting-measure convention for 0-dimensional facets
            return fv;
        }
        const int sd = s - 1;
        const Eigen::VectorXd c0 = basis.transpose() * center;
        std::size_t hits = 0;
        for (std::size_t it = 0; it < n; ++it) {
            Eigen::VectorXd c(sd);
            for (int k = 0; k < sd; ++k) c[k] = c0[k] + radius * (2.0 * rng.next_double() - 1.0);
            const Eigen::VectorXd z = basis * c + (center - basis * c0);
            if ((z - center).norm() > radius) continue;
            bool ok = true;
            for (int row = 0; row < coneA.rows(); ++row)
                if (coneA.row(row).dot(z) > 1e-10) ok = false;
            if (ok && level_dir && level_dir->dot(z) < level - 1e-10) ok = false;
            if (ok) ++hits;
        }
        const double boxvol = std::pow(2.0 * radius, sd);
        const double p = static_cast<double>(hits) / static_cast<double>(n);
        fv.value = p * boxvol;
        fv.se = boxvol * std::sqrt(std::max(p * (1.0 - p), 1.0 / n) / static_cast<double>(n));
        return fv;
    };

    for (int i : cx.iplus) {
        const auto& cone = cx.cones[i];
        Eigen::MatrixXd coneA(cx.num_vertices() - 1, s);
        int rrow = 0;
        for (int j = 0; j < cx.num_vertices(); ++j) {
            if (j == i) continue;
            coneA.row(rrow++) = (cx.vertices[j] - cx.vertices[i]).transpose();
        }

        // Case 1: facet sweeps at height eta-. Facet yhat uses the facet's own
        // positive rays; the slice height shrinks when rho would be exceeded.
        double facet_yhat1 = 0.0;
        for (const auto& f : cone.facets) {
            double best = kInf;
            for (int rid : f.ray_ids) {
                const double dt = cone.vertex.dot(cone.rays[rid]);
                if (dt > 1e-12) best = std::min(best, 1.0 / dt);
            }
            if (best < kInf) facet_yhat1 = std::max(facet_yhat1, best);
        }
        double eta_m = eta_minus;
        if (s >= 2 && facet_yhat1 > 0.0) eta_m = std::min(eta_m, 0.5 * rho / facet_yhat1);
        const double rho1 = rho - eta_m * facet_yhat1;

        double case1 = kInf;
        double case1_ci = 0.0;
        for (const auto& f : cone.facets) {
            int best_ray = -1;
            double best_norm = kInf;
            for (int rid : f.ray_ids) {
                const double dt = cone.vertex.dot(cone.rays[rid]);
                if (dt > 1e-12 && eta_m / dt < best_norm - 1e-15) {
                    best_norm = eta_m / dt;
                    best_ray = rid;
                }
            }
            if (s >= 2 && best_ray < 0) continue; // hyperplane misses this facet
            FacetVolume beta;
            if (s == 1) {
                beta.value = 1.0;
            } else {
                std::vector<Eigen::VectorXd> span_dirs;
                for (int rid : f.ray_ids) span_dirs.push_back(cone.rays[rid]);
                const Eigen::MatrixXd basis = orthonormal_span(span_dirs, s - 1);
                if (basis.size() == 0) continue;
                const Eigen::VectorXd yhat = (eta_m / cone.vertex.dot(cone.rays[best_ray])) * cone.rays[best_ray];
                beta = facet_volume(basis, yhat, coneA, &cone.vertex, eta_m, rho1,
                                    std::max<std::size_t>(2000, n_mc / (cx.iplus.size() * std::max<std::size_t>(1, cone.facets.size()) + 1)));
            }
            const double nn = f.normal.norm();
            const double cval = r * cx.alpha * cx.alpha * beta.value / nn;
            if (cval < case1) {
                case1 = cval;
                case1_ci = r * cx.alpha * cx.alpha * 3.0 * beta.se / nn;
            }
        }

        // Case 2: hyperplane slice of the whole cone at eta-.
        double case2 = kInf;
        double case2_ci = 0.0;
        {
            const double rho2 = rho - eta_plus * cone.yhat1_norm;
            if (rho2 > 0.0) {
                const double slice_const = cone.in_iplusplus ? cone.alpha_prime : cone.gamma_prime;
                FacetVolume betap;
                if (s == 1) {
                    betap.value = 1.0;
                } else {
                    std::vector<Eigen::VectorXd> comp;
                    // basis of {d_i}^perp via householder of d.
                    Eigen::MatrixXd D(s, 1);
                    D.col(0) = cone.vertex;
                    Eigen::HouseholderQR<Eigen::MatrixXd> qr(D);
                    Eigen::MatrixXd Q = qr.householderQ();
                    Eigen::MatrixXd basis = Q.rightCols(s - 1);
                    const Eigen::VectorXd yhat =
                        (eta_m / cone.vertex.dot(cone.rays[cone.yhat1_ray])) * cone.rays[cone.yhat1_ray];
                    betap = facet_volume(basis, yhat, coneA, nullptr, 0.0, rho2,
                                         std::max<std::size_t>(2000, n_mc / (cx.iplus.size() + 1)));
                }
                case2 = r * slice_const * slice_const * betap.value / cone.vertex.norm();
                case2_ci = r * slice_const * slice_const * 3.0 * betap.se / cone.vertex.norm();
                if (cone.in_ipm)
                    out.notes.push_back("cone " + std::to_string(i) +
                                        ": I+- slice constant uses gamma' (approximate)");
            } else {
                out.notes.push_back("cone " + std::to_string(i) +
                                    ": eta_plus too large for rho; case-2 constant unavailable");
            }
        }

        const double cone_kappa = std::min(case1, case2);
        if (cone_kappa < kappa) {
            kappa = cone_kappa;
            ci_at_min = case1 < case2 ? case1_ci : case2_ci;
        }
    }
    if (!std::isfinite(kappa)) throw NumericalFailure("no usable facet-sweep constant found");
    out.kappa_lower = kappa;
    out.ci_half = ci_at_min;
    return out;
}

// ---------------------------------------------------------------------------

CertificationReport certify_pipeline(const poly::RecourseSpec& spec,
                                     const measures::MeasureModel& measure,
                                     const measures::DensityCertificate& cert,
                                     const RegionSpec& region, const risk::RiskConfig& rcfg,
                                     const CertifyOptions& opts) {
    region.validate();
    CertificationReport rep;
    rep.r_used = cert.r;

    rep.a1.pass = poly::check_complete_recourse(spec);
    rep.a1.evidence = rep.a1.pass ? "cone(W) = R^s via 2s feasibility programs"
                                  : "some +/- unit right-hand side infeasible";
    const auto a2 = poly::check_sufficiently_expensive(spec);
    rep.a2.pass = a2.feasible;
    rep.a2.value = a2.delta;
    rep.a2.evidence = a2.feasible ? "strict dual witness with slack " + std::to_string(a2.delta)
                                  : "no strict interior point in {W^T v <= q}";

    const auto moment = measures::check_first_moment(measure);
    rep.a3.pass = moment.finite;
    rep.a3.value = moment.value;
    rep.a3.evidence = "E||z|| = " + std::to_string(moment.value);

    const auto floor = measures::verify_density_floor(measure, cert);
    rep.a4.pass = floor.pass;
    rep.a4.value = floor.observed_min;
    rep.a4.evidence = "grid minimum of the density over V+B_rho: " + std::to_string(floor.observed_min) +
                      " vs r = " + std::to_string(cert.r) + " (" + std::to_string(floor.n_points) +
                      " Halton points, probabilistic evidence)";

    rep.a6.pass = poly::check_a6(spec);
    rep.a6.value = spec.q.minCoeff();
    rep.a6.evidence = "min q component = " + std::to_string(spec.q.minCoeff());

    if (!(rep.a1.pass && rep.a2.pass)) {
        rep.a5.evidence = "skipped: needs A1 and A2 for the polyhedral decomposition";
        rep.all_requested_pass = false;
        return rep;
    }

    const auto verts = poly::enumerate_dual_vertices(spec);
    const auto cx = poly::build_cone_complex(verts);
    rep.omega_delta = opts.use_min_delta ? cx.delta_min : cx.delta;

    double rho_eff = cert.rho;
    Eigen::VectorXd reg_lo = region.v_lo, reg_hi = region.v_hi;
    if (region.u_box) {
        reg_lo = region.u_box->first;
        reg_hi = region.u_box->second;
        rho_eff += region_gap(region.v_lo, region.v_hi, reg_lo, reg_hi);
    }
    rep.rho_used = rho_eff;

    const double eta0 = eta0_max(cx, rho_eff);
    rep.a5.pass = eta0 > 0.0;
    rep.a5.value = eta0;
    rep.a5.evidence = std::isfinite(eta0)
                          ? "eta0 = " + std::to_string(eta0) + " from max ||yhat(1)||"
                          : "I+ empty; A5 vacuous (eta0 unbounded)";
    const bool a15 = rep.a1.pass && rep.a2.pass && rep.a3.pass && rep.a4.pass && rep.a5.pass;
    if (a15) rep.eta0 = eta0;

    risk::Evaluator ev(cx, measure, rcfg);

    const double eta0_finite = std::isfinite(eta0) ? eta0 : 1.0;
    rep.cvar_condition =
        cvar_condition_check(ev, reg_lo, reg_hi, opts.alpha, eta0_finite, rep.omega_delta,
                             opts.grid_per_dim);

    rep.var_bound = var_upper_bound(cx, measure, reg_lo, reg_hi, opts.alpha, eta0_finite);

    if (opts.distortion) {
        const auto cond = risk::distortion_condition_c(*opts.distortion, opts.alpha);
        rep.distortion_c = cond.c;
    }

    if (opts.run_moduli) {
        RepFunctional cvar_f{ev.replicate_count(), cx.dim,
                             [&ev, a = opts.alpha](int rr, const Eigen::VectorXd& x) {
                                 return ev.cvar_rep(rr, x, a);
                             }};
        rep.kappa_cvar = empirical_strong_convexity(cvar_f, reg_lo, reg_hi, opts.estimator);

        const double eta_fix = eta0_finite / 2.0;
        RepFunctional qee_f{ev.replicate_count(), cx.dim,
                            [&ev, eta_fix](int rr, const Eigen::VectorXd& x) {
                                return ev.expected_excess_rep(rr, x, eta_fix);
                            }};
        rep.kappa_qee_fixed_eta = empirical_strong_convexity(qee_f, reg_lo, reg_hi, opts.estimator);

        rep.kappa_partial = empirical_partial_sc(ev, reg_lo, reg_hi, eta0_finite / 20.0, eta0_finite,
                                                 opts.estimator);
        const auto omega = omega_set(cx, opts.use_min_delta ? cx.delta_min : -1.0);
        try {
            rep.kappa_restricted =
                empirical_restricted_psc(ev, reg_lo, reg_hi, eta0_finite, omega, opts.estimator);
        } catch (const TooFewAdmissiblePairs&) {
            // reported as absent
        }
    }

    if (opts.run_theoretical && a15 && cx.dim <= 3 && std::isfinite(eta0)) {
        try {
            rep.theoretical = theoretical_modulus(cx, rho_eff, cert.r, eta0 / 2.0, eta0);
        } catch (const std::exception&) {
            // informational only
        }
    }

    rep.all_requested_pass = a15 && rep.a6.pass && rep.cvar_condition->pass;
    return rep;
}

} // namespace riskconvex::certify
