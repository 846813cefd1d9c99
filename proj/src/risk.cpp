#include "riskconvex/risk.hpp"

#include "riskconvex/errors.hpp"
#include "riskconvex/geometry.hpp"
#include "riskconvex/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <thread>

namespace riskconvex::risk {

namespace {

struct DensityPiece {
    double theta = 0.0;
    Eigen::VectorXd lo, hi;
};

std::vector<DensityPiece> density_pieces(const measures::MeasureModel& m) {
    std::vector<DensityPiece> out;
    if (const auto* b = std::get_if<measures::BoxUniform>(&m.model)) {
        double vol = 1.0;
        for (int k = 0; k < m.dim; ++k) vol *= b->hi[k] - b->lo[k];
        out.push_back({1.0 / vol, b->lo, b->hi});
    } else if (const auto* mx = std::get_if<measures::MixtureOfBoxUniforms>(&m.model)) {
        for (std::size_t c = 0; c < mx->components.size(); ++c) {
            const auto& comp = mx->components[c];
            double vol = 1.0;
            for (int k = 0; k < m.dim; ++k) vol *= comp.hi[k] - comp.lo[k];
            out.push_back({mx->weights[static_cast<int>(c)] / vol, comp.lo, comp.hi});
        }
    } else if (const auto* g = std::get_if<measures::DensityGrid>(&m.model)) {
        std::vector<std::size_t> ncells(g->axes.size());
        std::size_t total = 1;
        for (std::size_t k = 0; k < g->axes.size(); ++k) {
            ncells[k] = g->axes[k].size() - 1;
            total *= ncells[k];
        }
        for (std::size_t c = 0; c < total; ++c) {
            if (g->values[c] <= 0.0) continue;
            DensityPiece p;
            p.theta = g->values[c];
            p.lo = Eigen::VectorXd(m.dim);
            p.hi = Eigen::VectorXd(m.dim);
            std::size_t rem = c;
            for (int k = m.dim; k-- > 0;) {
                const std::size_t ik = rem % ncells[k];
                rem /= ncells[k];
                p.lo[k] = g->axes[k][ik];
                p.hi[k] = g->axes[k][ik + 1];
            }
            out.push_back(std::move(p));
        }
    } else {
        throw NoDensity("density pieces requested for an empirical measure");
    }
    return out;
}

double golden_min(const std::function<double(double)>& f, double lo, double hi, double tol) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 300 && (b - a) > tol; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return std::min(fc, fd);
}

} // namespace

Evaluator::Evaluator(poly::ConeComplex complex, measures::MeasureModel measure, RiskConfig cfg)
    : complex_(std::move(complex)), measure_(std::move(measure)), cfg_(cfg) {
    if (measure_.dim != complex_.dim)
        throw ParseError("measure dimension does not match the recourse dimension");
    empirical_ = measure_.is_empirical();
    if (empirical_) {
        exact_ = true;
        const auto& e = std::get<measures::Empirical>(measure_.model);
        kernels::SampleBatch b(measure_.dim, static_cast<std::size_t>(e.points.rows()));
        for (int k = 0; k < measure_.dim; ++k)
            for (int j = 0; j < e.points.rows(); ++j) b.component(k)[j] = e.points(j, k);
        weights_.assign(e.weights.data(), e.weights.data() + e.weights.size());
        batches_.push_back(std::move(b));
        return;
    }
    if (cfg_.mode == IntegrationMode::Quadrature) {
        if (measure_.dim > 3)
            throw DimensionTooHigh("exact quadrature path supports dim <= 3; use Monte Carlo");
        exact_ = true;
        return;
    }
    const int R = std::max(1, cfg_.replicates);
    const std::size_t per = std::max<std::size_t>(1, cfg_.n_samples / static_cast<std::size_t>(R));
    batches_.reserve(R);
    for (int r = 0; r < R; ++r)
        batches_.push_back(measures::sample(measure_, per, substream_seed(cfg_.seed, 1000 + r)));
}

std::size_t Evaluator::total_samples() const {
    std::size_t n = 0;
    for (const auto& b : batches_) n += b.count;
    return n;
}

Evaluator::PhiView Evaluator::eval_phi(const kernels::SampleBatch& b, const Eigen::VectorXd& x,
                                       bool want_cones) const {
    PhiView v;
    v.phi.resize(b.count);
    if (want_cones) v.cone.resize(b.count);
    kernels::recourse_max(complex_.vertex_rows.data(), complex_.num_vertices(), complex_.dim, b,
                          x.data(), v.phi.data(), want_cones ? v.cone.data() : nullptr);
    return v;
}

std::vector<double> Evaluator::pooled_phi(const Eigen::VectorXd& x) const {
    std::vector<double> pooled;
    pooled.reserve(total_samples());
    if (cfg_.threads > 1 && batches_.size() > 1) {
        std::vector<std::vector<double>> parts(batches_.size());
        std::vector<std::thread> workers;
        const int T = std::min<int>(cfg_.threads, static_cast<int>(batches_.size()));
        for (int t = 0; t < T; ++t) {
            workers.emplace_back([&, t] {
                for (std::size_t r = t; r < batches_.size(); r += T)
                    parts[r] = eval_phi(batches_[r], x, false).phi;
            });
        }
        for (auto& w : workers) w.join();
        for (auto& p : parts) pooled.insert(pooled.end(), p.begin(), p.end());
        return pooled;
    }
    for (const auto& b : batches_) {
        auto v = eval_phi(b, x, false);
        pooled.insert(pooled.end(), v.phi.begin(), v.phi.end());
    }
    return pooled;
}

Estimate Evaluator::from_reps(const std::vector<double>& reps) const {
    Estimate e;
    const int R = static_cast<int>(reps.size());
    for (double v : reps) e.value += v;
    e.value /= R;
    if (R > 1) {
        double ss = 0.0;
        for (double v : reps) ss += (v - e.value) * (v - e.value);
        e.stderr_ = std::sqrt(ss / (R - 1.0) / R);
    }
    return e;
}

// ---------------------------------------------------------------------------
// Exact cone-cell integration (density-backed measures, dim <= 3).

namespace {

// Rows of the linearity cell of vertex i, shifted to x: K_i + x.
geom::HPolytope cone_cell(const poly::ConeComplex& cx, int i, const Eigen::VectorXd& x) {
    const int N = cx.num_vertices();
    const int s = cx.dim;
    geom::HPolytope P;
    P.A = Eigen::MatrixXd::Zero(N - 1, s);
    P.b = Eigen::VectorXd::Zero(N - 1);
    int r = 0;
    for (int j = 0; j < N; ++j) {
        if (j == i) continue;
        const Eigen::VectorXd diff = cx.vertices[j] - cx.vertices[i];
        P.A.row(r) = diff.transpose();
        P.b[r] = diff.dot(x);
        ++r;
    }
    return P;
}

geom::HPolytope with_level_cut(const geom::HPolytope& P, const Eigen::VectorXd& d,
                               const Eigen::VectorXd& x, double eta) {
    geom::HPolytope Q;
    Q.A = Eigen::MatrixXd::Zero(P.A.rows() + 1, P.A.cols());
    Q.b = Eigen::VectorXd::Zero(P.b.size() + 1);
    Q.A.topRows(P.A.rows()) = P.A;
    Q.b.head(P.b.size()) = P.b;
    Q.A.row(P.A.rows()) = -d.transpose();
    Q.b[P.b.size()] = -(eta + d.dot(x));
    return Q;
}

} // namespace

double Evaluator::exact_expectation(const Eigen::VectorXd& x) const {
    const auto pieces = density_pieces(measure_);
    double total = 0.0;
    for (int i = 0; i < complex_.num_vertices(); ++i) {
        const auto cell = cone_cell(complex_, i, x);
        for (const auto& p : pieces) {
            const auto vc = geom::volume_centroid(geom::intersect_box(cell, p.lo, p.hi));
            if (vc.volume <= 0.0) continue;
            total += p.theta * vc.volume * complex_.vertices[i].dot(vc.centroid - x);
        }
    }
    return total;
}

double Evaluator::exact_expected_excess(const Eigen::VectorXd& x, double eta) const {
    const auto pieces = density_pieces(measure_);
    double total = 0.0;
    for (int i = 0; i < complex_.num_vertices(); ++i) {
        const auto cell = with_level_cut(cone_cell(complex_, i, x), complex_.vertices[i], x, eta);
        for (const auto& p : pieces) {
            const auto vc = geom::volume_centroid(geom::intersect_box(cell, p.lo, p.hi));
            if (vc.volume <= 0.0) continue;
            total += p.theta * vc.volume * (complex_.vertices[i].dot(vc.centroid - x) - eta);
        }
    }
    return total;
}

EeGradient Evaluator::exact_gradient(const Eigen::VectorXd& x, double eta) const {
    const auto pieces = density_pieces(measure_);
    EeGradient g;
    g.grad_x = Eigen::VectorXd::Zero(complex_.dim);
    g.se_x = Eigen::VectorXd::Zero(complex_.dim);
    for (int i = 0; i < complex_.num_vertices(); ++i) {
        const auto cell = with_level_cut(cone_cell(complex_, i, x), complex_.vertices[i], x, eta);
        double mass = 0.0;
        for (const auto& p : pieces) {
            const auto vc = geom::volume_centroid(geom::intersect_box(cell, p.lo, p.hi));
            mass += p.theta * vc.volume;
        }
        g.grad_x -= mass * complex_.vertices[i];
        g.d_eta -= mass;
    }
    return g;
}

double Evaluator::exact_cdf(const Eigen::VectorXd& x, double t) const {
    const auto pieces = density_pieces(measure_);
    const int N = complex_.num_vertices();
    geom::HPolytope P;
    P.A = Eigen::MatrixXd(N, complex_.dim);
    P.b = Eigen::VectorXd(N);
    for (int i = 0; i < N; ++i) {
        P.A.row(i) = complex_.vertices[i].transpose();
        P.b[i] = t + complex_.vertices[i].dot(x);
    }
    double mass = 0.0;
    for (const auto& p : pieces) {
        const auto vc = geom::volume_centroid(geom::intersect_box(P, p.lo, p.hi));
        mass += p.theta * vc.volume;
    }
    return mass;
}

std::pair<double, double> Evaluator::phi_range(const Eigen::VectorXd& x) const {
    if (exact_ && !empirical_) {
        const auto pieces = density_pieces(measure_);
        double lo = -std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < complex_.num_vertices(); ++i) {
            double imin = std::numeric_limits<double>::infinity();
            double imax = -std::numeric_limits<double>::infinity();
            for (const auto& p : pieces) {
                const int s = complex_.dim;
                for (int corner = 0; corner < (1 << s); ++corner) {
                    Eigen::VectorXd z(s);
                    for (int k = 0; k < s; ++k) z[k] = (corner >> k) & 1 ? p.hi[k] : p.lo[k];
                    const double v = complex_.vertices[i].dot(z - x);
                    imin = std::min(imin, v);
                    imax = std::max(imax, v);
                }
            }
            lo = std::max(lo, imin);
            hi = std::max(hi, imax);
        }
        return {lo, hi};
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& b : batches_) {
        const auto v = eval_phi(b, x, false);
        for (double value : v.phi) {
            lo = std::min(lo, value);
            hi = std::max(hi, value);
        }
    }
    return {lo, hi};
}

double Evaluator::exact_var(const Eigen::VectorXd& x, double alpha) const {
    const double p = 1.0 - alpha;
    auto [lo, hi] = phi_range(x);
    if (p <= 0.0) return lo;
    if (exact_cdf(x, lo) >= p) return lo;
    for (int it = 0; it < 200 && (hi - lo) > 1e-12 * (1.0 + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (exact_cdf(x, mid) >= p - 1e-13) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

// ---------------------------------------------------------------------------
// Public evaluations.

Estimate Evaluator::q_expectation(const Eigen::VectorXd& x) const {
    if (exact_ && !empirical_) return {exact_expectation(x), 0.0};
    if (empirical_) {
        const auto v = eval_phi(batches_[0], x, false);
        double s = 0.0;
        for (std::size_t j = 0; j < v.phi.size(); ++j) s += weights_[j] * v.phi[j];
        return {s, 0.0};
    }
    std::vector<double> reps(batches_.size());
    for (std::size_t r = 0; r < batches_.size(); ++r) reps[r] = expectation_rep(static_cast<int>(r), x);
    return from_reps(reps);
}

double Evaluator::expectation_rep(int r, const Eigen::VectorXd& x) const {
    if (exact_ && !empirical_) return exact_expectation(x);
    const auto& b = batches_[static_cast<std::size_t>(r)];
    const auto v = eval_phi(b, x, false);
    if (empirical_) {
        double s = 0.0;
        for (std::size_t j = 0; j < v.phi.size(); ++j) s += weights_[j] * v.phi[j];
        return s;
    }
    double s = 0.0;
    for (double value : v.phi) s += value;
    return s / static_cast<double>(b.count);
}

Estimate Evaluator::q_expected_excess(const Eigen::VectorXd& x, double eta) const {
    if (exact_ && !empirical_) return {exact_expected_excess(x, eta), 0.0};
    if (empirical_) {
        const auto v = eval_phi(batches_[0], x, false);
        const auto s = kernels::excess_sums(v.phi.data(), weights_.data(), v.phi.size(), eta);
        return {s.excess, 0.0};
    }
    std::vector<double> reps(batches_.size());
    for (std::size_t r = 0; r < batches_.size(); ++r)
        reps[r] = expected_excess_rep(static_cast<int>(r), x, eta);
    return from_reps(reps);
}

double Evaluator::expected_excess_rep(int r, const Eigen::VectorXd& x, double eta) const {
    if (exact_ && !empirical_) return exact_expected_excess(x, eta);
    const auto& b = batches_[static_cast<std::size_t>(r)];
    const auto v = eval_phi(b, x, false);
    if (empirical_) {
        const auto s = kernels::excess_sums(v.phi.data(), weights_.data(), v.phi.size(), eta);
        return s.excess;
    }
    const auto s = kernels::excess_sums(v.phi.data(), nullptr, v.phi.size(), eta);
    return s.excess / static_cast<double>(b.count);
}

EeGradient Evaluator::gradient_rep(int r, const Eigen::VectorXd& x, double eta) const {
    if (exact_ && !empirical_) return exact_gradient(x, eta);
    const auto& b = batches_[static_cast<std::size_t>(r)];
    const auto v = eval_phi(b, x, true);
    const int N = complex_.num_vertices();
    std::vector<double> mass(N, 0.0);
    double tail = 0.0;
    for (std::size_t j = 0; j < v.phi.size(); ++j) {
        if (v.phi[j] >= eta) {
            const double w = empirical_ ? weights_[j] : 1.0 / static_cast<double>(b.count);
            mass[v.cone[j]] += w;
            tail += w;
        }
    }
    EeGradient g;
    g.grad_x = Eigen::VectorXd::Zero(complex_.dim);
    g.se_x = Eigen::VectorXd::Zero(complex_.dim);
    for (int i = 0; i < N; ++i) g.grad_x -= mass[i] * complex_.vertices[i];
    g.d_eta = -tail;
    return g;
}

EeGradient Evaluator::q_ee_gradient(const Eigen::VectorXd& x, double eta) const {
    if (exact_) return gradient_rep(0, x, eta);
    const int R = replicate_count();
    std::vector<EeGradient> reps;
    reps.reserve(R);
    for (int r = 0; r < R; ++r) reps.push_back(gradient_rep(r, x, eta));
    EeGradient g;
    g.grad_x = Eigen::VectorXd::Zero(complex_.dim);
    g.se_x = Eigen::VectorXd::Zero(complex_.dim);
    for (const auto& gr : reps) {
        g.grad_x += gr.grad_x;
        g.d_eta += gr.d_eta;
    }
    g.grad_x /= R;
    g.d_eta /= R;
    if (R > 1) {
        Eigen::VectorXd ss = Eigen::VectorXd::Zero(complex_.dim);
        double se = 0.0;
        for (const auto& gr : reps) {
            ss += (gr.grad_x - g.grad_x).cwiseAbs2();
            se += (gr.d_eta - g.d_eta) * (gr.d_eta - g.d_eta);
        }
        g.se_x = (ss / ((R - 1.0) * R)).cwiseSqrt();
        g.se_eta = std::sqrt(se / ((R - 1.0) * R));
    }
    return g;
}

double Evaluator::q_var(const Eigen::VectorXd& x, double alpha) const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw Unsupported("q_var requires alpha in (0,1]");
    if (exact_ && !empirical_) return exact_var(x, alpha);
    const double p = 1.0 - alpha;
    if (empirical_) {
        const auto v = eval_phi(batches_[0], x, false);
        std::vector<std::pair<double, double>> zw(v.phi.size());
        for (std::size_t j = 0; j < v.phi.size(); ++j) zw[j] = {v.phi[j], weights_[j]};
        std::sort(zw.begin(), zw.end());
        if (p <= 0.0) return zw.front().first;
        double c = 0.0;
        for (const auto& [z, w] : zw) {
            c += w;
            if (c >= p - 1e-12) return z;
        }
        return zw.back().first;
    }
    std::vector<double> pooled = pooled_phi(x);
    const std::size_t n = pooled.size();
    if (p <= 0.0) return *std::min_element(pooled.begin(), pooled.end());
    std::size_t k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n) - 1e-9));
    k = std::clamp<std::size_t>(k, 1, n);
    std::nth_element(pooled.begin(), pooled.begin() + (k - 1), pooled.end());
    return pooled[k - 1];
}

double Evaluator::cvar_from_sorted(const std::vector<double>& sorted_phi,
                                   const std::vector<double>* cumw, double alpha) const {
    const double p = 1.0 - alpha;
    const std::size_t n = sorted_phi.size();
    double var;
    if (cumw) {
        var = sorted_phi.back();
        for (std::size_t j = 0; j < n; ++j) {
            if ((*cumw)[j] >= p - 1e-12) {
                var = sorted_phi[j];
                break;
            }
        }
        if (p <= 0.0) var = sorted_phi.front();
        double excess = 0.0;
        for (std::size_t j = n; j-- > 0;) {
            const double w = (*cumw)[j] - (j == 0 ? 0.0 : (*cumw)[j - 1]);
            const double d = sorted_phi[j] - var;
            if (d <= 0.0) break;
            excess += w * d;
        }
        return var + excess / alpha;
    }
    std::size_t k = p <= 0.0 ? 1 : static_cast<std::size_t>(std::ceil(p * static_cast<double>(n) - 1e-9));
    k = std::clamp<std::size_t>(k, 1, n);
    var = sorted_phi[k - 1];
    double excess = 0.0;
    for (std::size_t j = n; j-- > k - 1;) {
        const double d = sorted_phi[j] - var;
        if (d <= 0.0) break;
        excess += d;
    }
    return var + excess / (alpha * static_cast<double>(n));
}

Estimate Evaluator::q_cvar(const Eigen::VectorXd& x, double alpha) const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw Unsupported("q_cvar requires alpha in (0,1]");
    Estimate out;
    double route_a;
    double se = 0.0;
    if (exact_ && !empirical_) {
        const double v = exact_var(x, alpha);
        route_a = v + exact_expected_excess(x, v) / alpha;
    } else if (empirical_) {
        const auto v = eval_phi(batches_[0], x, false);
        std::vector<std::size_t> order(v.phi.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return v.phi[a] < v.phi[b]; });
        std::vector<double> sorted(v.phi.size()), cumw(v.phi.size());
        double c = 0.0;
        for (std::size_t j = 0; j < order.size(); ++j) {
            sorted[j] = v.phi[order[j]];
            c += weights_[order[j]];
            cumw[j] = c;
        }
        route_a = cvar_from_sorted(sorted, &cumw, alpha);
    } else {
        std::vector<double> pooled = pooled_phi(x);
        std::sort(pooled.begin(), pooled.end());
        route_a = cvar_from_sorted(pooled, nullptr, alpha);
        std::vector<double> reps(batches_.size());
        for (std::size_t r = 0; r < batches_.size(); ++r) reps[r] = cvar_rep(static_cast<int>(r), x, alpha);
        se = from_reps(reps).stderr_;
    }

    // Route (b): golden-section over the variational objective.
    auto [lo, hi] = phi_range(x);
    if (hi <= lo) hi = lo + 1.0;
    double route_b;
    if (exact_ && !empirical_) {
        route_b = golden_min(
            [&](double eta) { return eta + exact_expected_excess(x, eta) / alpha; }, lo, hi,
            1e-11 * (1.0 + hi - lo));
    } else {
        const double* wdata = empirical_ ? weights_.data() : nullptr;
        const auto v = empirical_ ? eval_phi(batches_[0], x, false) : PhiView{pooled_phi(x), {}};
        const double n = empirical_ ? 1.0 : static_cast<double>(v.phi.size());
        route_b = golden_min(
            [&](double eta) {
                const auto s = kernels::excess_sums(v.phi.data(), wdata, v.phi.size(), eta);
                return eta + s.excess / (alpha * n);
            },
            lo, hi, 1e-11 * (1.0 + hi - lo));
    }
    const double tol = std::max(cfg_.cross_check_se * se, 1e-6 * (1.0 + std::abs(route_a)));
    if (std::abs(route_a - route_b) > tol)
        throw CrossCheckFailure("CVaR routes disagree: plug-in " + std::to_string(route_a) +
                                " vs variational " + std::to_string(route_b));
    out.value = route_a;
    out.stderr_ = se;
    return out;
}

double Evaluator::cvar_rep(int r, const Eigen::VectorXd& x, double alpha) const {
    if (exact_ && !empirical_) {
        const double v = exact_var(x, alpha);
        return v + exact_expected_excess(x, v) / alpha;
    }
    const auto& b = batches_[static_cast<std::size_t>(r)];
    const auto v = eval_phi(b, x, false);
    if (empirical_) {
        std::vector<std::size_t> order(v.phi.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t c) { return v.phi[a] < v.phi[c]; });
        std::vector<double> sorted(v.phi.size()), cumw(v.phi.size());
        double c = 0.0;
        for (std::size_t j = 0; j < order.size(); ++j) {
            sorted[j] = v.phi[order[j]];
            c += weights_[order[j]];
            cumw[j] = c;
        }
        return cvar_from_sorted(sorted, &cumw, alpha);
    }
    std::vector<double> sorted(v.phi);
    std::sort(sorted.begin(), sorted.end());
    return cvar_from_sorted(sorted, nullptr, alpha);
}

std::vector<std::pair<double, double>> Evaluator::discretized_mixing(const DistortionFunction& g) const {
    return distortion_measure(g).discretize(alpha_cell_bounds(cfg_.alpha_cells));
}

double Evaluator::distortion_rep(int r, const Eigen::VectorXd& x,
                                 const std::vector<std::pair<double, double>>& atoms) const {
    if (exact_ && !empirical_) {
        double total = 0.0;
        for (const auto& [a, w] : atoms) {
            const double v = exact_var(x, a);
            total += w * (v + exact_expected_excess(x, v) / a);
        }
        return total;
    }
    const auto& b = batches_[static_cast<std::size_t>(r)];
    const auto v = eval_phi(b, x, false);
    double total = 0.0;
    if (empirical_) {
        std::vector<std::size_t> order(v.phi.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t c) { return v.phi[a] < v.phi[c]; });
        std::vector<double> sorted(v.phi.size()), cumw(v.phi.size());
        double c = 0.0;
        for (std::size_t j = 0; j < order.size(); ++j) {
            sorted[j] = v.phi[order[j]];
            c += weights_[order[j]];
            cumw[j] = c;
        }
        for (const auto& [a, w] : atoms) total += w * cvar_from_sorted(sorted, &cumw, a);
        return total;
    }
    std::vector<double> sorted(v.phi);
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [a, w] : atoms) total += w * cvar_from_sorted(sorted, nullptr, a);
    return total;
}

Estimate Evaluator::q_distortion(const Eigen::VectorXd& x, const DistortionFunction& g) const {
    const auto atoms = discretized_mixing(g);
    if (exact_) return {distortion_rep(0, x, atoms), 0.0};
    std::vector<double> pooled = pooled_phi(x);
    std::sort(pooled.begin(), pooled.end());
    double value = 0.0;
    for (const auto& [a, w] : atoms) value += w * cvar_from_sorted(pooled, nullptr, a);
    std::vector<double> reps(batches_.size());
    for (std::size_t r = 0; r < batches_.size(); ++r)
        reps[r] = distortion_rep(static_cast<int>(r), x, atoms);
    Estimate e = from_reps(reps);
    e.value = value;
    return e;
}

double Evaluator::pushforward_cdf(const Eigen::VectorXd& x, double t) const {
    if (exact_ && !empirical_) return exact_cdf(x, t);
    if (empirical_) {
        const auto v = eval_phi(batches_[0], x, false);
        double mass = 0.0;
        for (std::size_t j = 0; j < v.phi.size(); ++j)
            if (v.phi[j] <= t) mass += weights_[j];
        return mass;
    }
    const auto pooled = pooled_phi(x);
    std::size_t cnt = 0;
    for (double value : pooled)
        if (value <= t) ++cnt;
    return static_cast<double>(cnt) / static_cast<double>(pooled.size());
}

} // namespace riskconvex::risk
