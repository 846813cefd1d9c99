#include "riskconvex/measures.hpp"

#include "riskconvex/errors.hpp"
#include "riskconvex/lp.hpp"
#include "riskconvex/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace riskconvex::measures {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double box_volume(const BoxUniform& b) {
    double v = 1.0;
    for (int k = 0; k < b.lo.size(); ++k) v *= (b.hi[k] - b.lo[k]);
    return v;
}

std::vector<double> grid_cell_masses(const DensityGrid& g) {
    std::vector<std::size_t> ncells(g.axes.size());
    std::size_t total = 1;
    for (std::size_t k = 0; k < g.axes.size(); ++k) {
        ncells[k] = g.axes[k].size() - 1;
        total *= ncells[k];
    }
    std::vector<double> mass(total, 0.0);
    for (std::size_t c = 0; c < total; ++c) {
        std::size_t rem = c;
        double vol = 1.0;
        for (std::size_t k = g.axes.size(); k-- > 0;) {
            const std::size_t ik = rem % ncells[k];
            rem /= ncells[k];
            vol *= g.axes[k][ik + 1] - g.axes[k][ik];
        }
        mass[c] = g.values[c] * vol;
    }
    return mass;
}

} // namespace

MeasureModel MeasureModel::box_uniform(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    MeasureModel m;
    m.model = BoxUniform{lo, hi};
    m.dim = static_cast<int>(lo.size());
    m.validate();
    return m;
}

MeasureModel MeasureModel::mixture(std::vector<BoxUniform> comps, const Eigen::VectorXd& weights) {
    MeasureModel m;
    m.dim = comps.empty() ? 0 : static_cast<int>(comps[0].lo.size());
    m.model = MixtureOfBoxUniforms{std::move(comps), weights};
    m.validate();
    return m;
}

MeasureModel MeasureModel::density_grid(std::vector<std::vector<double>> axes, std::vector<double> values) {
    MeasureModel m;
    m.dim = static_cast<int>(axes.size());
    m.model = DensityGrid{std::move(axes), std::move(values)};
    m.validate();
    return m;
}

MeasureModel MeasureModel::empirical(const Eigen::MatrixXd& points, const Eigen::VectorXd& weights) {
    MeasureModel m;
    m.dim = static_cast<int>(points.cols());
    Eigen::VectorXd w = weights;
    if (w.size() == 0) w = Eigen::VectorXd::Constant(points.rows(), 1.0 / static_cast<double>(points.rows()));
    m.model = Empirical{points, w};
    m.validate();
    return m;
}

std::string MeasureModel::kind() const {
    if (std::holds_alternative<BoxUniform>(model)) return "box_uniform";
    if (std::holds_alternative<MixtureOfBoxUniforms>(model)) return "mixture";
    if (std::holds_alternative<DensityGrid>(model)) return "density_grid";
    return "empirical";
}

void MeasureModel::validate() const {
    if (dim < 1) throw ParseError("measure: dimension must be >= 1");
    if (const auto* b = std::get_if<BoxUniform>(&model)) {
        if (b->lo.size() != dim || b->hi.size() != dim) throw ParseError("measure.bounds: wrong dimension");
        for (int k = 0; k < dim; ++k)
            if (!(b->lo[k] < b->hi[k])) throw ParseError("measure.bounds: lo must be < hi");
    } else if (const auto* mx = std::get_if<MixtureOfBoxUniforms>(&model)) {
        if (mx->components.empty()) throw ParseError("measure.components: empty mixture");
        if (mx->weights.size() != static_cast<int>(mx->components.size()))
            throw ParseError("measure.weights: length mismatch");
        if (mx->weights.minCoeff() < 0.0) throw ParseError("measure.weights: negative weight");
        if (std::abs(mx->weights.sum() - 1.0) > 1e-12) throw ParseError("measure.weights: must sum to 1");
        for (const auto& c : mx->components) {
            if (c.lo.size() != dim || c.hi.size() != dim) throw ParseError("measure.components: wrong dimension");
            for (int k = 0; k < dim; ++k)
                if (!(c.lo[k] < c.hi[k])) throw ParseError("measure.components: lo must be < hi");
        }
    } else if (const auto* g = std::get_if<DensityGrid>(&model)) {
        if (static_cast<int>(g->axes.size()) != dim) throw ParseError("measure.axes: wrong dimension");
        std::size_t total = 1;
        for (const auto& ax : g->axes) {
            if (ax.size() < 2) throw ParseError("measure.axes: need at least one cell per axis");
            for (std::size_t i = 1; i < ax.size(); ++i)
                if (!(ax[i - 1] < ax[i])) throw ParseError("measure.axes: boundaries must increase");
            total *= ax.size() - 1;
        }
        if (g->values.size() != total) throw ParseError("measure.values: length must match cell count");
        double mass = 0.0;
        for (double v : g->values)
            if (v < 0.0) throw ParseError("measure.values: negative density");
        for (double m2 : grid_cell_masses(*g)) mass += m2;
        if (std::abs(mass - 1.0) > 1e-6) throw ParseError("measure.values: density must integrate to 1");
    } else {
        const auto& e = std::get<Empirical>(model);
        if (e.points.rows() < 1) throw ParseError("measure.points: empty scenario set");
        if (e.points.cols() != dim) throw ParseError("measure.points: wrong dimension");
        if (e.weights.size() != e.points.rows()) throw ParseError("measure.weights: length mismatch");
        if (e.weights.minCoeff() < 0.0) throw ParseError("measure.weights: negative weight");
        if (std::abs(e.weights.sum() - 1.0) > 1e-12) throw ParseError("measure.weights: must sum to 1");
    }
}

void MeasureModel::support_box(Eigen::VectorXd& lo, Eigen::VectorXd& hi) const {
    lo = Eigen::VectorXd::Constant(dim, kInf);
    hi = Eigen::VectorXd::Constant(dim, -kInf);
    if (const auto* b = std::get_if<BoxUniform>(&model)) {
        lo = b->lo;
        hi = b->hi;
    } else if (const auto* mx = std::get_if<MixtureOfBoxUniforms>(&model)) {
        for (const auto& c : mx->components) {
            lo = lo.cwiseMin(c.lo);
            hi = hi.cwiseMax(c.hi);
        }
    } else if (const auto* g = std::get_if<DensityGrid>(&model)) {
        for (int k = 0; k < dim; ++k) {
            lo[k] = g->axes[k].front();
            hi[k] = g->axes[k].back();
        }
    } else {
        const auto& e = std::get<Empirical>(model);
        lo = e.points.colwise().minCoeff().transpose();
        hi = e.points.colwise().maxCoeff().transpose();
    }
}

namespace {

std::size_t categorical(const std::vector<double>& cum, double u) {
    const auto it = std::upper_bound(cum.begin(), cum.end(), u * cum.back());
    const std::size_t idx = static_cast<std::size_t>(it - cum.begin());
    return std::min(idx, cum.size() - 1);
}

void sample_chunk(const MeasureModel& m, Rng& rng, kernels::SampleBatch& out, std::size_t begin,
                  std::size_t end, const std::vector<double>& aux_cum) {
    const int s = m.dim;
    if (const auto* b = std::get_if<BoxUniform>(&m.model)) {
        for (std::size_t j = begin; j < end; ++j)
            for (int k = 0; k < s; ++k) out.component(k)[j] = rng.uniform(b->lo[k], b->hi[k]);
    } else if (const auto* mx = std::get_if<MixtureOfBoxUniforms>(&m.model)) {
        for (std::size_t j = begin; j < end; ++j) {
            const std::size_t c = categorical(aux_cum, rng.next_double());
            const auto& comp = mx->components[c];
            for (int k = 0; k < s; ++k) out.component(k)[j] = rng.uniform(comp.lo[k], comp.hi[k]);
        }
    } else if (const auto* g = std::get_if<DensityGrid>(&m.model)) {
        std::vector<std::size_t> ncells(g->axes.size());
        for (std::size_t k = 0; k < g->axes.size(); ++k) ncells[k] = g->axes[k].size() - 1;
        for (std::size_t j = begin; j < end; ++j) {
            std::size_t c = categorical(aux_cum, rng.next_double());
            std::vector<std::size_t> ik(s);
            for (int k = s; k-- > 0;) {
                ik[k] = c % ncells[k];
                c /= ncells[k];
            }
            for (int k = 0; k < s; ++k)
                out.component(k)[j] = rng.uniform(g->axes[k][ik[k]], g->axes[k][ik[k] + 1]);
        }
    } else {
        const auto& e = std::get<Empirical>(m.model);
        for (std::size_t j = begin; j < end; ++j) {
            const std::size_t c = categorical(aux_cum, rng.next_double());
            for (int k = 0; k < s; ++k) out.component(k)[j] = e.points(static_cast<Eigen::Index>(c), k);
        }
    }
}

std::vector<double> aux_cumulative(const MeasureModel& m) {
    std::vector<double> cum;
    if (const auto* mx = std::get_if<MixtureOfBoxUniforms>(&m.model)) {
        double acc = 0.0;
        for (int i = 0; i < mx->weights.size(); ++i) {
            acc += mx->weights[i];
            cum.push_back(acc);
        }
    } else if (const auto* g = std::get_if<DensityGrid>(&m.model)) {
        double acc = 0.0;
        for (double mass : grid_cell_masses(*g)) {
            acc += mass;
            cum.push_back(acc);
        }
    } else if (const auto* e = std::get_if<Empirical>(&m.model)) {
        double acc = 0.0;
        for (int i = 0; i < e->weights.size(); ++i) {
            acc += e->weights[i];
            cum.push_back(acc);
        }
    }
    return cum;
}

} // namespace

kernels::SampleBatch sample(const MeasureModel& m, std::size_t n, std::uint64_t seed, std::size_t chunk) {
    m.validate();
    kernels::SampleBatch out(m.dim, n);
    const auto aux = aux_cumulative(m);
    std::size_t begin = 0;
    std::uint64_t stream = 0;
    while (begin < n) {
        const std::size_t end = std::min(n, begin + chunk);
        Rng rng(substream_seed(seed, stream++));
        sample_chunk(m, rng, out, begin, end, aux);
        begin = end;
    }
    return out;
}

namespace {

double box_abs_moment_1d(double lo, double hi) {
    if (lo >= 0.0) return 0.5 * (lo + hi);
    if (hi <= 0.0) return -0.5 * (lo + hi);
    return (lo * lo + hi * hi) / (2.0 * (hi - lo));
}

// Gauss-Legendre nodes/weights on [-1,1], 24 points (Golub-Welsch offline).
void gauss_legendre_24(std::vector<double>& x, std::vector<double>& w) {
    static const double xs[12] = {0.0640568928626056, 0.1911188674736163, 0.3150426796961634,
                                  0.4337935076260451, 0.5454214713888396, 0.6480936519369755,
                                  0.7401241915785544, 0.8200019859739029, 0.8864155270044011,
                                  0.9382745520027328, 0.9747285559713095, 0.9951872199970213};
    static const double ws[12] = {0.1279381953467522, 0.1258374563468283, 0.1216704729278034,
                                  0.1155056680537256, 0.1074442701159656, 0.0976186521041139,
                                  0.0861901615319533, 0.0733464814110803, 0.0592985849154368,
                                  0.0442774388174198, 0.0285313886289337, 0.0123412297999872};
    x.clear();
    w.clear();
    for (int i = 11; i >= 0; --i) {
        x.push_back(-xs[i]);
        w.push_back(ws[i]);
    }
    for (int i = 0; i < 12; ++i) {
        x.push_back(xs[i]);
        w.push_back(ws[i]);
    }
}

double box_norm_moment(const BoxUniform& b) {
    const int s = static_cast<int>(b.lo.size());
    if (s == 1) return box_abs_moment_1d(b.lo[0], b.hi[0]);
    std::vector<double> x, w;
    gauss_legendre_24(x, w);
    const int G = static_cast<int>(x.size());
    double total = 0.0;
    std::vector<int> idx(s, 0);
    while (true) {
        double wt = 1.0;
        Eigen::VectorXd z(s);
        for (int k = 0; k < s; ++k) {
            const double mid = 0.5 * (b.lo[k] + b.hi[k]);
            const double half = 0.5 * (b.hi[k] - b.lo[k]);
            z[k] = mid + half * x[idx[k]];
            wt *= 0.5 * w[idx[k]];
        }
        total += wt * z.norm();
        int k = s - 1;
        while (k >= 0 && ++idx[k] == G) idx[k--] = 0;
        if (k < 0) break;
    }
    return total;
}

} // namespace

MomentResult check_first_moment(const MeasureModel& m, std::size_t mc_n, std::uint64_t mc_seed) {
    MomentResult out;
    if (const auto* b = std::get_if<BoxUniform>(&m.model)) {
        out.value = box_norm_moment(*b);
    } else if (const auto* mx = std::get_if<MixtureOfBoxUniforms>(&m.model)) {
        for (std::size_t c = 0; c < mx->components.size(); ++c)
            out.value += mx->weights[static_cast<int>(c)] * box_norm_moment(mx->components[c]);
    } else if (std::holds_alternative<DensityGrid>(m.model)) {
        const auto batch = sample(m, mc_n, mc_seed);
        double sum = 0.0, sq = 0.0;
        for (std::size_t j = 0; j < batch.count; ++j) {
            double nrm2 = 0.0;
            for (int k = 0; k < m.dim; ++k) nrm2 += batch.component(k)[j] * batch.component(k)[j];
            const double v = std::sqrt(nrm2);
            sum += v;
            sq += v * v;
        }
        out.value = sum / static_cast<double>(mc_n);
        const double var = std::max(0.0, sq / static_cast<double>(mc_n) - out.value * out.value);
        out.stderr_ = std::sqrt(var / static_cast<double>(mc_n));
    } else {
        const auto& e = std::get<Empirical>(m.model);
        for (int i = 0; i < e.points.rows(); ++i) out.value += e.weights[i] * e.points.row(i).norm();
    }
    return out;
}

double density(const MeasureModel& m, const Eigen::VectorXd& z) {
    if (const auto* b = std::get_if<BoxUniform>(&m.model)) {
        for (int k = 0; k < m.dim; ++k)
            if (z[k] < b->lo[k] || z[k] >= b->hi[k]) return 0.0;
        return 1.0 / box_volume(*b);
    }
    if (const auto* mx = std::get_if<MixtureOfBoxUniforms>(&m.model)) {
        double th = 0.0;
        for (std::size_t c = 0; c < mx->components.size(); ++c) {
            const auto& comp = mx->components[c];
            bool in = true;
            for (int k = 0; k < m.dim; ++k)
                if (z[k] < comp.lo[k] || z[k] >= comp.hi[k]) in = false;
            if (in) th += mx->weights[static_cast<int>(c)] / box_volume(comp);
        }
        return th;
    }
    if (const auto* g = std::get_if<DensityGrid>(&m.model)) {
        std::size_t cell = 0;
        for (int k = 0; k < m.dim; ++k) {
            const auto& ax = g->axes[k];
            if (z[k] < ax.front() || z[k] >= ax.back()) return 0.0;
            const auto it = std::upper_bound(ax.begin(), ax.end(), z[k]);
            const std::size_t ik = static_cast<std::size_t>(it - ax.begin()) - 1;
            cell = cell * (ax.size() - 1) + ik;
        }
        return g->values[cell];
    }
    throw NoDensity("empirical measures have no Lebesgue density");
}

namespace {

double halton(std::size_t index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

} // namespace

FloorCheckResult verify_density_floor(const MeasureModel& m, const DensityCertificate& cert,
                                      std::size_t n_grid) {
    if (!m.has_density()) throw NoDensity("verify_density_floor requires a density-backed measure");
    static const int primes[6] = {2, 3, 5, 7, 11, 13};
    if (m.dim > 6) throw DimensionTooHigh("density floor grid supports dim <= 6");
    FloorCheckResult out;
    out.observed_min = kInf;
    out.n_points = n_grid;
    Eigen::VectorXd z(m.dim);
    for (std::size_t j = 0; j < n_grid; ++j) {
        for (int k = 0; k < m.dim; ++k) {
            const double u = halton(j + 101, primes[k]);
            z[k] = (cert.v_lo[k] - cert.rho) + u * ((cert.v_hi[k] + cert.rho) - (cert.v_lo[k] - cert.rho));
        }
        const double th = density(m, z);
        if (th < out.observed_min) {
            out.observed_min = th;
            out.argmin = z;
        }
    }
    out.pass = out.observed_min >= cert.r - 1e-12;
    return out;
}

// ---------------------------------------------------------------------------
// Wasserstein machinery.

namespace {

// Quantile function as piecewise-linear segments over u in (0,1).
struct QSeg {
    double u0, u1; // mass interval
    double z0, z1; // quantile values at the ends (z1 == z0 for atoms)
};

std::vector<QSeg> quantile_segments_1d(const MeasureModel& m) {
    std::vector<QSeg> segs;
    if (const auto* e = std::get_if<Empirical>(&m.model)) {
        std::vector<std::pair<double, double>> zw(e->points.rows());
        for (int i = 0; i < e->points.rows(); ++i) zw[i] = {e->points(i, 0), e->weights[i]};
        std::sort(zw.begin(), zw.end());
        double c = 0.0;
        for (const auto& [z, w] : zw) {
            if (w <= 0.0) continue;
            segs.push_back({c, c + w, z, z});
            c += w;
        }
        return segs;
    }
    // Density kinds: assemble piecewise-constant density pieces.
    std::vector<double> bounds;
    auto add_bounds = [&](double a, double b) {
        bounds.push_back(a);
        bounds.push_back(b);
    };
    if (const auto* b = std::get_if<BoxUniform>(&m.model)) {
        add_bounds(b->lo[0], b->hi[0]);
    } else if (const auto* mx = std::get_if<MixtureOfBoxUniforms>(&m.model)) {
        for (const auto& c : mx->components) add_bounds(c.lo[0], c.hi[0]);
    } else if (const auto* g = std::get_if<DensityGrid>(&m.model)) {
        for (double x : g->axes[0]) bounds.push_back(x);
    }
    std::sort(bounds.begin(), bounds.end());
    bounds.erase(std::unique(bounds.begin(), bounds.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-14; }),
                 bounds.end());
    double c = 0.0;
    Eigen::VectorXd mid(1);
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
        mid[0] = 0.5 * (bounds[i] + bounds[i + 1]);
        const double th = density(m, mid);
        if (th <= 0.0) continue;
        const double mass = th * (bounds[i + 1] - bounds[i]);
        segs.push_back({c, c + mass, bounds[i], bounds[i + 1]});
        c += mass;
    }
    // Normalize tiny drift so both measures share the exact domain (0,1).
    if (!segs.empty() && std::abs(c - 1.0) > 0.0) {
        for (auto& s : segs) {
            s.u0 /= c;
            s.u1 /= c;
        }
    }
    return segs;
}

double quantile_at(const std::vector<QSeg>& segs, double u) {
    for (const auto& s : segs) {
        if (u <= s.u1 || &s == &segs.back()) {
            if (u <= s.u0) return s.z0;
            const double t = (u - s.u0) / (s.u1 - s.u0);
            return s.z0 + t * (s.z1 - s.z0);
        }
    }
    return segs.back().z1;
}

double wasserstein_1d(const MeasureModel& a, const MeasureModel& b, double p,
                      const WassersteinOptions& opts) {
    const auto sa = quantile_segments_1d(a);
    const auto sb = quantile_segments_1d(b);
    std::vector<double> cuts{0.0, 1.0};
    for (const auto& s : sa) {
        cuts.push_back(s.u0);
        cuts.push_back(s.u1);
    }
    for (const auto& s : sb) {
        cuts.push_back(s.u0);
        cuts.push_back(s.u1);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double x, double y) { return std::abs(x - y) < 1e-15; }),
               cuts.end());

    // Sign-change points of the (piecewise linear) quantile difference.
    std::vector<double> cuts2;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double ua = cuts[i], ub = cuts[i + 1];
        cuts2.push_back(ua);
        const double eps = (ub - ua) * 1e-9;
        const double fa = quantile_at(sa, ua + eps) - quantile_at(sb, ua + eps);
        const double fb = quantile_at(sa, ub - eps) - quantile_at(sb, ub - eps);
        if (fa * fb < 0.0) {
            const double t = fa / (fa - fb);
            cuts2.push_back(ua + t * (ub - ua));
        }
    }
    cuts2.push_back(1.0);
    std::sort(cuts2.begin(), cuts2.end());

    static const double gx[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                 0.8611363115940526};
    static const double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                 0.3478548451374538};
    const double hmin = 1.0 / static_cast<double>(opts.quantile_points);
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < cuts2.size(); ++i) {
        const double ua = cuts2[i], ub = cuts2[i + 1];
        if (ub - ua < 1e-16) continue;
        const int nsub = std::max(1, static_cast<int>(std::ceil((ub - ua) / hmin / 8.0)));
        for (int ssub = 0; ssub < nsub; ++ssub) {
            const double va = ua + (ub - ua) * ssub / nsub;
            const double vb = ua + (ub - ua) * (ssub + 1) / nsub;
            const double c0 = 0.5 * (va + vb), h = 0.5 * (vb - va);
            for (int gq = 0; gq < 4; ++gq) {
                const double u = c0 + h * gx[gq];
                const double d = std::abs(quantile_at(sa, u) - quantile_at(sb, u));
                integral += h * gw[gq] * std::pow(d, p);
            }
        }
    }
    return std::pow(integral, 1.0 / p);
}

double wasserstein_discrete(const Empirical& a, const Empirical& b, double p,
                            const WassersteinOptions& opts) {
    const std::size_t na = static_cast<std::size_t>(a.points.rows());
    const std::size_t nb = static_cast<std::size_t>(b.points.rows());
    if (na > opts.max_support || nb > opts.max_support)
        throw Unsupported("discrete optimal transport limited to " + std::to_string(opts.max_support) +
                          " support points per side");
    const int m = static_cast<int>(na + nb - 1); // last demand row is redundant
    lp::StandardFormLp sf(m);
    for (std::size_t i = 0; i < na; ++i) sf.rhs[static_cast<int>(i)] = a.weights[static_cast<int>(i)];
    for (std::size_t j = 0; j + 1 < nb; ++j) sf.rhs[static_cast<int>(na + j)] = b.weights[static_cast<int>(j)];
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
            const double cost = std::pow((a.points.row(static_cast<int>(i)) - b.points.row(static_cast<int>(j))).norm(), p);
            std::vector<std::pair<int, double>> col{{static_cast<int>(i), 1.0}};
            if (j + 1 < nb) col.emplace_back(static_cast<int>(na + j), 1.0);
            sf.add_column(cost, std::move(col));
        }
    }
    // Northwest-corner crash basis (spanning tree of the transportation graph).
    std::vector<int> hint;
    {
        std::size_t i = 0, j = 0;
        double ra = a.weights[0], rb = b.weights[0];
        while (hint.size() < static_cast<std::size_t>(m)) {
            hint.push_back(static_cast<int>(i * nb + j));
            if (i + 1 == na && j + 1 == nb) break;
            if ((ra <= rb && i + 1 < na) || j + 1 == nb) {
                rb -= ra;
                ++i;
                ra = a.weights[static_cast<int>(i)];
            } else {
                ra -= rb;
                ++j;
                rb = b.weights[static_cast<int>(j)];
            }
        }
    }
    lp::LpOptions opts_lp;
    const auto sol = lp::solve_standard(sf, opts_lp, hint.size() == static_cast<std::size_t>(m) ? &hint : nullptr);
    if (sol.status != lp::LpStatus::Optimal) throw NumericalFailure("transport LP failed");
    return std::pow(std::max(0.0, sol.value), 1.0 / p);
}

} // namespace

double wasserstein_p(const MeasureModel& a, const MeasureModel& b, double p,
                     const WassersteinOptions& opts) {
    if (p < 1.0) throw Unsupported("wasserstein_p requires p >= 1");
    if (a.dim != b.dim) throw Unsupported("wasserstein_p requires equal dimensions");
    if (a.dim == 1) return wasserstein_1d(a, b, p, opts);
    if (a.is_empirical() && b.is_empirical())
        return wasserstein_discrete(std::get<Empirical>(a.model), std::get<Empirical>(b.model), p, opts);
    throw Unsupported("multi-dimensional Wasserstein requires empirical measures on both sides");
}

double ball_mass(const MeasureModel& m, double t, std::size_t mc_n, std::uint64_t mc_seed) {
    if (t < 0.0) return 0.0;
    if (const auto* e = std::get_if<Empirical>(&m.model)) {
        double mass = 0.0;
        for (int i = 0; i < e->points.rows(); ++i)
            if (e->points.row(i).norm() <= t + 1e-15) mass += e->weights[i];
        return mass;
    }
    if (m.dim == 1) {
        // Exact interval mass of [-t, t] from the density pieces.
        const auto segs = quantile_segments_1d(m);
        double mass = 0.0;
        for (const auto& s : segs) {
            if (s.z1 <= s.z0) continue;
            const double a = std::max(s.z0, -t);
            const double b = std::min(s.z1, t);
            if (b > a) mass += (s.u1 - s.u0) * (b - a) / (s.z1 - s.z0);
        }
        return mass;
    }
    const auto batch = sample(m, mc_n, mc_seed);
    std::size_t cnt = 0;
    for (std::size_t j = 0; j < batch.count; ++j) {
        double nrm2 = 0.0;
        for (int k = 0; k < m.dim; ++k) nrm2 += batch.component(k)[j] * batch.component(k)[j];
        if (std::sqrt(nrm2) <= t) ++cnt;
    }
    return static_cast<double>(cnt) / static_cast<double>(mc_n);
}

} // namespace riskconvex::measures
