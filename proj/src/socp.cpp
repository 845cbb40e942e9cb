#include "swipt/socp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>

namespace swipt {

// ---------------------------------------------------------------------------
// Program container

SocProgram::SocProgram(int n) : n_vars(n) {
    lower = Vec::Constant(n, -std::numeric_limits<double>::infinity());
    upper = Vec::Constant(n, std::numeric_limits<double>::infinity());
}

void SocProgram::add_cone(SpMat A, Vec b, SpVec c, double d) {
    cones.push_back({std::move(A), std::move(b), std::move(c), d});
}

void SocProgram::add_cone(const Mat& A, const Vec& b, const Vec& c, double d) {
    add_cone(SpMat(A.sparseView()), b, SpVec(c.sparseView()), d);
}

void SocProgram::add_linear(SpVec g, double h) { linear.push_back({std::move(g), h}); }

void SocProgram::add_linear(const Vec& g, double h) { add_linear(SpVec(g.sparseView()), h); }

void SocProgram::set_bounds(int i, double lo, double hi) {
    require(i >= 0 && i < n_vars, "set_bounds: index out of range");
    lower(i) = lo;
    upper(i) = hi;
}

void SocProgram::validate() const {
    require(n_vars >= 0, "program: negative variable count");
    require(lower.size() == n_vars && upper.size() == n_vars, "program: bound vectors sized wrong");
    require((lower.array() <= upper.array()).all(), "program: lower bound above upper bound");
    if (objective) require(objective->size() == n_vars, "program: objective length");
    for (const auto& k : cones) {
        require(k.A.cols() == n_vars && k.c.size() == n_vars, "program: cone width");
        require(k.A.rows() == k.b.size(), "program: cone offset length");
    }
    for (const auto& l : linear) require(l.g.size() == n_vars, "program: linear row width");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double cone_scale(const ConeConstraint& k) {
    double s = std::abs(k.d);
    for (SpVec::InnerIterator it(k.c); it; ++it) s = std::max(s, std::abs(it.value()));
    for (int j = 0; j < k.A.outerSize(); ++j)
        for (SpMat::InnerIterator it(k.A, j); it; ++it) s = std::max(s, std::abs(it.value()));
    if (k.b.size()) s = std::max(s, k.b.cwiseAbs().maxCoeff());
    return s > 0 ? s : 1.0;
}

double linear_scale(const LinearConstraint& l) {
    double s = std::abs(l.h);
    for (SpVec::InnerIterator it(l.g); it; ++it) s = std::max(s, std::abs(it.value()));
    return s > 0 ? s : 1.0;
}

double sparse_dot(const SpVec& a, const Vec& x) {
    double v = 0;
    for (SpVec::InnerIterator it(a); it; ++it) v += it.value() * x(it.index());
    return v;
}

Vec clip(const SocProgram& p, const Vec& x) { return x.cwiseMax(p.lower).cwiseMin(p.upper); }

}  // namespace

double SocProgram::max_violation(const Vec& x) const {
    double v = 0;
    for (int i = 0; i < n_vars; ++i) v = std::max({v, lower(i) - x(i), x(i) - upper(i)});
    for (const auto& k : cones) {
        double f = (k.A * x + k.b).norm() - sparse_dot(k.c, x) - k.d;
        v = std::max(v, f / cone_scale(k));
    }
    for (const auto& l : linear) v = std::max(v, (sparse_dot(l.g, x) - l.h) / linear_scale(l));
    return v;
}

std::string SocProgram::dump() const {
    std::ostringstream os;
    os.precision(17);
    os << "vars " << n_vars << '\n';
    if (objective) os << "maximize " << objective->transpose() << '\n';
    for (int i = 0; i < n_vars; ++i)
        if (std::isfinite(lower(i)) || std::isfinite(upper(i)))
            os << "bound " << i << ' ' << lower(i) << ' ' << upper(i) << '\n';
    for (const auto& k : cones) {
        os << "cone rows=" << k.A.rows() << " d=" << k.d << " c=";
        for (SpVec::InnerIterator it(k.c); it; ++it) os << it.index() << ':' << it.value() << ' ';
        os << "A=";
        for (int j = 0; j < k.A.outerSize(); ++j)
            for (SpMat::InnerIterator it(k.A, j); it; ++it)
                os << '(' << it.row() << ',' << it.col() << "):" << it.value() << ' ';
        os << "b=" << k.b.transpose() << '\n';
    }
    for (const auto& l : linear) {
        os << "linear h=" << l.h << " g=";
        for (SpVec::InnerIterator it(l.g); it; ++it) os << it.index() << ':' << it.value() << ' ';
        os << '\n';
    }
    return os.str();
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::feasible: return "feasible";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        case SolveStatus::numerical_failure: return "numerical-failure";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Standard conic form: minimize c.x subject to G x + s = h, s in R+^L x Q x ... x Q.

namespace {

using RowSp = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct SocBlock {
    int off = 0;
    int dim = 0;
    std::vector<int> support;  // sorted variable indices touched by the block
    SpMat G_loc;               // dim x |support|
    Mat Q;                     // G_loc' J G_loc
};

struct ConicForm {
    int n = 0;
    int L = 0;  // orthant rows come first
    Vec c, h;
    RowSp G;
    std::vector<SocBlock> socs;
    int rows() const { return static_cast<int>(h.size()); }
    int degree() const { return L + static_cast<int>(socs.size()); }
};

struct FormBuilder {
    int n;
    std::vector<Eigen::Triplet<double>> orth_trip, soc_trip;
    std::vector<double> orth_h, soc_h;
    std::vector<std::pair<int, int>> soc_ranges;  // (offset within soc rows, dim)

    void orth_row(const std::vector<std::pair<int, double>>& row, double h) {
        int r = static_cast<int>(orth_h.size());
        for (auto [j, v] : row) orth_trip.emplace_back(r, j, v);
        orth_h.push_back(h);
    }
    // Rows of s = h - G x: s0 = d + c.x + t_coef t, s1 = b + A x.
    void soc(const ConeConstraint& k, double scale, int t_index) {
        int r0 = static_cast<int>(soc_h.size());
        for (SpVec::InnerIterator it(k.c); it; ++it) soc_trip.emplace_back(r0, it.index(), -it.value() / scale);
        if (t_index >= 0) soc_trip.emplace_back(r0, t_index, -1.0);
        soc_h.push_back(k.d / scale);
        for (int j = 0; j < k.A.outerSize(); ++j)
            for (SpMat::InnerIterator it(k.A, j); it; ++it)
                soc_trip.emplace_back(r0 + 1 + it.row(), j, -it.value() / scale);
        for (int i = 0; i < k.b.size(); ++i) soc_h.push_back(k.b(i) / scale);
        soc_ranges.emplace_back(r0, static_cast<int>(k.b.size()) + 1);
    }

    ConicForm finish(Vec c) {
        ConicForm f;
        f.n = n;
        f.L = static_cast<int>(orth_h.size());
        const int m = f.L + static_cast<int>(soc_h.size());
        f.c = std::move(c);
        f.h.resize(m);
        for (int i = 0; i < f.L; ++i) f.h(i) = orth_h[i];
        for (size_t i = 0; i < soc_h.size(); ++i) f.h(f.L + static_cast<int>(i)) = soc_h[i];
        std::vector<Eigen::Triplet<double>> all = orth_trip;
        for (const auto& t : soc_trip) all.emplace_back(t.row() + f.L, t.col(), t.value());
        f.G.resize(m, n);
        f.G.setFromTriplets(all.begin(), all.end());
        f.G.makeCompressed();
        for (auto [r0, dim] : soc_ranges) {
            SocBlock b;
            b.off = f.L + r0;
            b.dim = dim;
            std::vector<char> used(n, 0);
            for (int r = b.off; r < b.off + dim; ++r)
                for (RowSp::InnerIterator it(f.G, r); it; ++it) used[it.col()] = 1;
            std::vector<int> pos(n, -1);
            for (int j = 0; j < n; ++j)
                if (used[j]) {
                    pos[j] = static_cast<int>(b.support.size());
                    b.support.push_back(j);
                }
            std::vector<Eigen::Triplet<double>> loc;
            for (int r = b.off; r < b.off + dim; ++r)
                for (RowSp::InnerIterator it(f.G, r); it; ++it) loc.emplace_back(r - b.off, pos[it.col()], it.value());
            b.G_loc.resize(dim, static_cast<int>(b.support.size()));
            b.G_loc.setFromTriplets(loc.begin(), loc.end());
            Vec jdiag = Vec::Constant(dim, -1.0);
            jdiag(0) = 1.0;
            SpMat JG = jdiag.asDiagonal() * b.G_loc;
            b.Q = Mat(SpMat(b.G_loc.transpose() * JG));
            f.socs.push_back(std::move(b));
        }
        return f;
    }
};

// ---------------------------------------------------------------------------
// Cone arithmetic

double soc_min_eig(const Vec& u, int off, int dim) { return u(off) - u.segment(off + 1, dim - 1).norm(); }

double min_eig(const ConicForm& f, const Vec& u) {
    double v = kInf;
    for (int i = 0; i < f.L; ++i) v = std::min(v, u(i));
    for (const auto& b : f.socs) v = std::min(v, soc_min_eig(u, b.off, b.dim));
    return v;
}

void add_identity(const ConicForm& f, Vec& u, double a) {
    u.head(f.L).array() += a;
    for (const auto& b : f.socs) u(b.off) += a;
}

Vec identity(const ConicForm& f) {
    Vec e = Vec::Zero(f.rows());
    add_identity(f, e, 1.0);
    return e;
}

Vec jordan_product(const ConicForm& f, const Vec& u, const Vec& v) {
    Vec w(u.size());
    w.head(f.L) = u.head(f.L).cwiseProduct(v.head(f.L));
    for (const auto& b : f.socs) {
        const int o = b.off, p = b.dim - 1;
        w(o) = u.segment(o, b.dim).dot(v.segment(o, b.dim));
        w.segment(o + 1, p) = u(o) * v.segment(o + 1, p) + v(o) * u.segment(o + 1, p);
    }
    return w;
}

// Solves u o x = v for x.
Vec jordan_divide(const ConicForm& f, const Vec& u, const Vec& v) {
    Vec x(u.size());
    x.head(f.L) = v.head(f.L).cwiseQuotient(u.head(f.L));
    for (const auto& b : f.socs) {
        const int o = b.off, p = b.dim - 1;
        const double u0 = u(o);
        const double det = u0 * u0 - u.segment(o + 1, p).squaredNorm();
        const double x0 = (u0 * v(o) - u.segment(o + 1, p).dot(v.segment(o + 1, p))) / det;
        x(o) = x0;
        x.segment(o + 1, p) = (v.segment(o + 1, p) - x0 * u.segment(o + 1, p)) / u0;
    }
    return x;
}

// Largest alpha with u + alpha du inside the cone (infinity if unbounded).
double max_step(const ConicForm& f, const Vec& u, const Vec& du) {
    double a_max = kInf;
    for (int i = 0; i < f.L; ++i)
        if (du(i) < 0) a_max = std::min(a_max, -u(i) / du(i));
    for (const auto& b : f.socs) {
        const int o = b.off, p = b.dim - 1;
        const double x0 = u(o), d0 = du(o);
        auto x1 = u.segment(o + 1, p);
        auto d1 = du.segment(o + 1, p);
        const double qa = d0 * d0 - d1.squaredNorm();
        const double qb = x0 * d0 - x1.dot(d1);
        const double qc = std::max(x0 * x0 - x1.squaredNorm(), 0.0);
        if (qa >= 0 && d0 >= 0) continue;
        const double disc = qb * qb - qa * qc;
        double step;
        if (disc < 0) {
            step = d0 < 0 ? -x0 / d0 : kInf;
        } else {
            const double den = -qb + std::sqrt(disc);
            step = den > 0 ? qc / den : kInf;
        }
        a_max = std::min(a_max, step);
    }
    return a_max;
}

// Nesterov-Todd scaling: W z = W^{-1} s = lambda.
struct Scaling {
    Vec d;                   // orthant part, sqrt(s / z)
    std::vector<double> eta;
    std::vector<Vec> wbar;   // unit hyperbolic-norm scaling points
    Vec lambda;
};

bool nt_scaling(const ConicForm& f, const Vec& s, const Vec& z, Scaling& w) {
    w.d.resize(f.L);
    w.lambda.resize(s.size());
    for (int i = 0; i < f.L; ++i) {
        if (!(s(i) > 0 && z(i) > 0)) return false;
        w.d(i) = std::sqrt(s(i) / z(i));
        w.lambda(i) = std::sqrt(s(i) * z(i));
    }
    w.eta.resize(f.socs.size());
    w.wbar.resize(f.socs.size());
    for (size_t k = 0; k < f.socs.size(); ++k) {
        const auto& b = f.socs[k];
        const int o = b.off, p = b.dim - 1;
        const double sres = s(o) * s(o) - s.segment(o + 1, p).squaredNorm();
        const double zres = z(o) * z(o) - z.segment(o + 1, p).squaredNorm();
        if (!(sres > 0 && zres > 0 && s(o) > 0 && z(o) > 0)) return false;
        Vec sb = s.segment(o, b.dim) / std::sqrt(sres);
        Vec zb = z.segment(o, b.dim) / std::sqrt(zres);
        const double gamma = std::sqrt((1 + sb.dot(zb)) / 2);
        Vec wb(b.dim);
        wb(0) = (sb(0) + zb(0)) / (2 * gamma);
        wb.tail(p) = (sb.tail(p) - zb.tail(p)) / (2 * gamma);
        w.wbar[k] = wb;
        w.eta[k] = std::pow(sres / zres, 0.25);
        // lambda = W z
        const double w0 = wb(0);
        auto w1 = wb.tail(p);
        auto z1 = z.segment(o + 1, p);
        const double t = w1.dot(z1);
        w.lambda(o) = w.eta[k] * (w0 * z(o) + t);
        w.lambda.segment(o + 1, p) = w.eta[k] * (z1 + (z(o) + t / (1 + w0)) * w1);
    }
    return true;
}

// y = W v (power = 1) or W^{-1} v (power = -1).
Vec apply_w(const ConicForm& f, const Scaling& w, const Vec& v, int power) {
    Vec y(v.size());
    if (power > 0) y.head(f.L) = v.head(f.L).cwiseProduct(w.d);
    else y.head(f.L) = v.head(f.L).cwiseQuotient(w.d);
    for (size_t k = 0; k < f.socs.size(); ++k) {
        const auto& b = f.socs[k];
        const int o = b.off, p = b.dim - 1;
        const Vec& wb = w.wbar[k];
        const double w0 = wb(0);
        auto w1 = wb.tail(p);
        auto v1 = v.segment(o + 1, p);
        const double t = w1.dot(v1);
        const double sg = power > 0 ? 1.0 : -1.0;
        const double sc = power > 0 ? w.eta[k] : 1.0 / w.eta[k];
        y(o) = sc * (w0 * v(o) + sg * t);
        y.segment(o + 1, p) = sc * (v1 + (sg * v(o) + t / (1 + w0)) * w1);
    }
    return y;
}

// ---------------------------------------------------------------------------
// Interior-point method on the homogeneous self-dual embedding

bool trace_enabled() {
    static const bool on = std::getenv("SWIPT_SOLVER_TRACE") != nullptr;
    return on;
}

enum class IpmExit { optimal, optimal_inaccurate, primal_infeasible, dual_infeasible, early_stop, max_iter, numerical };

struct IpmResult {
    IpmExit exit = IpmExit::numerical;
    Vec x, s, z;
    double tau = 1, kappa = 1;
    int iterations = 0;
    double ops = 0;
    double pcost = 0, dcost = 0;
};

struct IterateInfo {
    Vec x_hat;
    double pres, dres, pcost, dcost;
};

// Returns true to stop early.
using EarlyStop = std::function<bool(const IterateInfo&)>;

class NormalSystem {
   public:
    NormalSystem(const ConicForm& f) : f_(f), H_(f.n, f.n) {}

    double assemble(const Scaling& w) {
        H_.setZero();
        double ops = 0;
        for (int r = 0; r < f_.L; ++r) {
            const double wt = 1.0 / (w.d(r) * w.d(r));
            for (RowSp::InnerIterator a(f_.G, r); a; ++a)
                for (RowSp::InnerIterator b(f_.G, r); b; ++b) H_(a.col(), b.col()) += wt * a.value() * b.value();
            ops += 1.0 * f_.G.row(r).nonZeros() * f_.G.row(r).nonZeros();
        }
        for (size_t k = 0; k < f_.socs.size(); ++k) {
            const auto& b = f_.socs[k];
            const Vec& wb = w.wbar[k];
            Vec a = -wb;
            a(0) = wb(0);  // J wbar
            Vec g = b.G_loc.transpose() * a;
            const double s = 1.0 / (w.eta[k] * w.eta[k]);
            Mat local = s * (2.0 * g * g.transpose() - b.Q);
            const int ns = static_cast<int>(b.support.size());
            if (ns == f_.n) {
                H_ += local;
            } else {
                for (int j = 0; j < ns; ++j)
                    for (int i = 0; i < ns; ++i) H_(b.support[i], b.support[j]) += local(i, j);
            }
            ops += 3.0 * ns * ns + 2.0 * b.G_loc.nonZeros();
        }
        return ops;
    }

    // Cholesky of D^{-1} H D^{-1} with D = sqrt(diag H), so the regularization is relative per column.
    bool factor() {
        dscale_ = H_.diagonal().cwiseAbs().cwiseMax(1e-300).cwiseSqrt();
        Mat Hs = dscale_.cwiseInverse().asDiagonal() * H_ * dscale_.cwiseInverse().asDiagonal();
        reg_ = 1e-14;
        for (int attempt = 0; attempt < 6; ++attempt) {
            Mat Hr = Hs;
            Hr.diagonal().array() += reg_;
            llt_.compute(Hr);
            if (llt_.info() == Eigen::Success) return true;
            reg_ *= 100;
        }
        return false;
    }

    Vec solve(const Vec& r) const {
        return llt_.solve(r.cwiseQuotient(dscale_)).cwiseQuotient(dscale_);
    }
    const Mat& H() const { return H_; }

   private:
    const ConicForm& f_;
    Mat H_;
    Eigen::LLT<Mat> llt_;
    Vec dscale_;
    double reg_ = 0;
};

constexpr int kRefineRounds = 3;

// Solves [0 G'; G -W^2] [dx; dz] = [r1; r2] by normal equations plus refinement.
void kkt_solve(const ConicForm& f, const Scaling& w, const NormalSystem& ns, const Vec& r1, const Vec& r2, Vec& dx,
               Vec& dz) {
    auto winv2 = [&](const Vec& v) { return apply_w(f, w, apply_w(f, w, v, -1), -1); };
    auto w2 = [&](const Vec& v) { return apply_w(f, w, apply_w(f, w, v, 1), 1); };
    dx = ns.solve(r1 + f.G.transpose() * winv2(r2));
    dz = winv2(f.G * dx - r2);
    for (int it = 0; it < kRefineRounds; ++it) {
        Vec e1 = r1 - f.G.transpose() * dz;
        Vec e2 = r2 - (f.G * dx - w2(dz));
        if (std::max(e1.lpNorm<Eigen::Infinity>(), e2.lpNorm<Eigen::Infinity>()) <
            1e-14 * (1 + std::max(r1.lpNorm<Eigen::Infinity>(), r2.lpNorm<Eigen::Infinity>())))
            break;
        Vec cx = ns.solve(e1 + f.G.transpose() * winv2(e2));
        Vec cz = winv2(f.G * cx - e2);
        dx += cx;
        dz += cz;
    }
}

IpmResult run_ipm(const ConicForm& f, const SolverOptions& opts, const EarlyStop& early) {
    IpmResult res;
    const int n = f.n, m = f.rows();
    const double nu = f.degree();
    const double hnorm = std::max(1.0, f.h.norm()), cnorm = std::max(1.0, f.c.norm());
    const double n3 = std::pow(static_cast<double>(n), 3) / 3.0;

    // Initial point from two least-squares problems with W = I.
    NormalSystem ns(f);
    Scaling unit;
    unit.d = Vec::Ones(f.L);
    for (const auto& b : f.socs) {
        Vec wb = Vec::Zero(b.dim);
        wb(0) = 1;
        unit.wbar.push_back(wb);
        unit.eta.push_back(1.0);
    }
    res.ops += ns.assemble(unit);
    if (!ns.factor()) return res;
    res.ops += n3;
    Vec x, s, z;
    {
        Vec dz;
        kkt_solve(f, unit, ns, Vec::Zero(n), f.h, x, dz);
        s = f.h - f.G * x;
        Vec dx;
        kkt_solve(f, unit, ns, -f.c, Vec::Zero(m), dx, z);
        const double ts = -min_eig(f, s), tz = -min_eig(f, z);
        if (ts >= -1e-8 * std::max(1.0, s.norm())) add_identity(f, s, 1 + ts);
        if (tz >= -1e-8 * std::max(1.0, z.norm())) add_identity(f, z, 1 + tz);
    }
    double tau = 1, kappa = 1;
    const Vec e = identity(f);
    // Best iterate within relaxed tolerances, returned if accuracy is lost later.
    IpmResult best;
    double best_gap = kInf;
    auto fallback = [&](IpmExit why) {
        if (best_gap < 1e3 * opts.gap_tol) {
            best.exit = IpmExit::optimal_inaccurate;
            best.iterations = res.iterations;
            best.ops = res.ops;
            return best;
        }
        res.exit = why;
        return res;
    };

    for (int iter = 0; iter <= opts.max_iter; ++iter) {
        res.iterations = iter;
        Vec rx = f.G.transpose() * z + f.c * tau;
        Vec rz = s + f.G * x - f.h * tau;
        const double cx = f.c.dot(x), hz = f.h.dot(z);
        const double rt = kappa + cx + hz;

        IterateInfo info;
        info.x_hat = x / tau;
        info.pres = rz.norm() / tau / hnorm;
        info.dres = rx.norm() / tau / cnorm;
        info.pcost = cx / tau;
        info.dcost = -hz / tau;
        const double gap = s.dot(z) / (tau * tau);
        double relgap = kInf;
        if (info.pcost < 0) relgap = gap / -info.pcost;
        else if (info.dcost > 0) relgap = gap / info.dcost;

        res.x = x, res.s = s, res.z = z, res.tau = tau, res.kappa = kappa;
        res.pcost = info.pcost, res.dcost = info.dcost;
        if (trace_enabled())
            std::fprintf(stderr, "ipm %3d pres %.2e dres %.2e pcost %+.6e dcost %+.6e gap %.2e tau %.2e kap %.2e\n",
                         iter, info.pres, info.dres, info.pcost, info.dcost, gap, tau, kappa);
        if (!x.allFinite() || !z.allFinite() || !s.allFinite()) return fallback(IpmExit::numerical);
        const double g = std::min(gap, relgap);
        if (info.pres < opts.feas_tol && info.dres < opts.feas_tol && g < opts.gap_tol) {
            res.exit = IpmExit::optimal;
            return res;
        }
        if (info.pres < 100 * opts.feas_tol && info.dres < 100 * opts.feas_tol && g < best_gap) {
            best_gap = g;
            best = res;
        }
        if (hz < 0 && (f.G.transpose() * z).norm() / cnorm <= opts.feas_tol * -hz) {
            res.exit = IpmExit::primal_infeasible;
            return res;
        }
        if (cx < 0 && (f.G * x + s).norm() / hnorm <= opts.feas_tol * -cx) {
            res.exit = IpmExit::dual_infeasible;
            return res;
        }
        if (early && early(info)) {
            res.exit = IpmExit::early_stop;
            return res;
        }
        if (iter == opts.max_iter) break;

        Scaling w;
        if (!nt_scaling(f, s, z, w)) return fallback(IpmExit::numerical);
        res.ops += ns.assemble(w);
        if (!ns.factor()) return fallback(IpmExit::numerical);
        res.ops += n3 + 12.0 * (static_cast<double>(n) * n + f.G.nonZeros());
        const double mu = (s.dot(z) + tau * kappa) / (nu + 1);

        Vec dx2, dz2;
        kkt_solve(f, w, ns, -f.c, f.h, dx2, dz2);
        const double denom_base = f.c.dot(dx2) + f.h.dot(dz2);

        auto direction = [&](double sigma, const Vec& ds_target, double dk_target, Vec& dx, Vec& ds, Vec& dz,
                             double& dtau, double& dkap) {
            const Vec bx = -(1 - sigma) * rx;
            const Vec bz = -(1 - sigma) * rz;
            const double bt = -(1 - sigma) * rt;
            Vec ldiv = jordan_divide(f, w.lambda, ds_target);
            Vec wl = apply_w(f, w, ldiv, 1);
            Vec dx1, dz1;
            kkt_solve(f, w, ns, bx, bz + wl, dx1, dz1);
            dtau = (bt + dk_target / tau - f.c.dot(dx1) - f.h.dot(dz1)) / (denom_base - kappa / tau);
            dx = dx1 + dtau * dx2;
            dz = dz1 + dtau * dz2;
            ds = -wl - apply_w(f, w, apply_w(f, w, dz, 1), 1);
            dkap = (-dk_target - kappa * dtau) / tau;
        };
        auto step_len = [&](const Vec& ds, const Vec& dz, double dtau, double dkap) {
            double a = std::min(max_step(f, s, ds), max_step(f, z, dz));
            if (dtau < 0) a = std::min(a, -tau / dtau);
            if (dkap < 0) a = std::min(a, -kappa / dkap);
            return a;
        };

        // Predictor
        Vec dxa, dsa, dza;
        double dta, dka;
        Vec ll = jordan_product(f, w.lambda, w.lambda);
        direction(0.0, ll, tau * kappa, dxa, dsa, dza, dta, dka);
        const double a_aff = std::min(1.0, step_len(dsa, dza, dta, dka));
        const double sigma = std::pow(1 - a_aff, 3);

        // Corrector with Mehrotra second-order term
        Vec corr = jordan_product(f, apply_w(f, w, dsa, -1), apply_w(f, w, dza, 1));
        Vec target = ll + corr - sigma * mu * e;
        const double ktarget = tau * kappa + dta * dka - sigma * mu;
        Vec dxc, dsc, dzc;
        double dtc, dkc;
        direction(sigma, target, ktarget, dxc, dsc, dzc, dtc, dkc);
        double a = std::min(1.0, 0.99 * step_len(dsc, dzc, dtc, dkc));
        if (!(a > 1e-12)) return fallback(IpmExit::numerical);
        x += a * dxc;
        s += a * dsc;
        z += a * dzc;
        tau += a * dtc;
        kappa += a * dkc;
    }
    return fallback(IpmExit::max_iter);
}

// ---------------------------------------------------------------------------
// Drivers

void add_common_rows(const SocProgram& p, FormBuilder& fb, int t_index) {
    for (int i = 0; i < p.n_vars; ++i) {
        if (std::isfinite(p.upper(i))) fb.orth_row({{i, 1.0}}, p.upper(i));
        if (std::isfinite(p.lower(i))) fb.orth_row({{i, -1.0}}, -p.lower(i));
    }
    for (const auto& l : p.linear) {
        const double sc = linear_scale(l);
        std::vector<std::pair<int, double>> row;
        for (SpVec::InnerIterator it(l.g); it; ++it) row.emplace_back(static_cast<int>(it.index()), it.value() / sc);
        if (t_index >= 0) row.emplace_back(t_index, -1.0);
        fb.orth_row(row, l.h / sc);
    }
    for (const auto& k : p.cones) fb.soc(k, cone_scale(k), t_index);
}

// Subgradient projection onto the most violated constraint, clipped to the box.
bool polyak_projection(const SocProgram& p, Vec& x, double tol, int max_iter, double& ops) {
    x = clip(p, x);
    for (int it = 0; it < max_iter; ++it) {
        double worst = tol / 2;
        Vec g;
        for (const auto& k : p.cones) {
            const double sc = cone_scale(k);
            Vec r = k.A * x + k.b;
            const double nr = r.norm();
            const double v = (nr - sparse_dot(k.c, x) - k.d) / sc;
            if (v > worst) {
                worst = v;
                Vec gc = -Vec(k.c);
                if (nr > 0) gc += k.A.transpose() * r / nr;
                g = gc / sc;
            }
            ops += 2.0 * k.A.nonZeros();
        }
        for (const auto& l : p.linear) {
            const double sc = linear_scale(l);
            const double v = (sparse_dot(l.g, x) - l.h) / sc;
            if (v > worst) {
                worst = v;
                g = Vec(l.g) / sc;
            }
        }
        if (g.size() == 0) return true;
        const double gn = g.squaredNorm();
        if (gn == 0) return false;
        x = clip(p, x - worst / gn * g);
    }
    return p.max_violation(x) <= tol;
}

}  // namespace

FeasibilityResult solve_feasibility(const SocProgram& prog, const SolverOptions& opts) {
    prog.validate();
    FeasibilityResult out;
    const int n = prog.n_vars;
    if (prog.cones.empty() && prog.linear.empty()) {
        out.point = clip(prog, Vec::Zero(n));
        out.status = SolveStatus::feasible;
        out.max_violation = prog.max_violation(out.point);
        return out;
    }

    // Phase-1: minimize a common slack t >= -1 added to every cone and row.
    FormBuilder fb{n + 1, {}, {}, {}, {}, {}};
    add_common_rows(prog, fb, n);
    fb.orth_row({{n, -1.0}}, 1.0);
    Vec c = Vec::Zero(n + 1);
    c(n) = 1.0;
    ConicForm f = fb.finish(c);

    bool found = false;
    bool refuted = false;
    Vec best;
    EarlyStop early = [&](const IterateInfo& info) {
        Vec xc = clip(prog, info.x_hat.head(n));
        if (prog.max_violation(xc) <= opts.feas_tol) {
            best = xc;
            found = true;
            return true;
        }
        if (info.dres <= 0.1 * opts.feas_tol && info.dcost > 10 * opts.feas_tol) {
            refuted = true;
            return true;
        }
        return false;
    };
    IpmResult r = run_ipm(f, opts, early);
    out.iterations = r.iterations;
    out.arithmetic_ops_estimate = r.ops;
    out.objective = r.pcost;

    if (found) {
        out.status = SolveStatus::feasible;
        out.point = best;
    } else if (refuted) {
        out.status = SolveStatus::infeasible;
        out.point = clip(prog, r.x.head(n) / r.tau);
    } else if (r.exit == IpmExit::optimal || r.exit == IpmExit::optimal_inaccurate) {
        out.point = clip(prog, r.x.head(n) / r.tau);
        out.status = prog.max_violation(out.point) <= opts.feas_tol ? SolveStatus::feasible : SolveStatus::infeasible;
    } else if (r.exit == IpmExit::primal_infeasible) {
        // Only the box can be inconsistent in phase-1.
        out.status = SolveStatus::infeasible;
        out.point = clip(prog, Vec::Zero(n));
    } else {
        out.diagnostics = "interior-point breakdown after " + std::to_string(r.iterations) + " iterations";
        Vec x0 = r.x.size() == n + 1 && r.tau > 0 ? Vec(r.x.head(n) / r.tau) : Vec::Zero(n);
        if (!x0.allFinite()) x0 = Vec::Zero(n);
        double ops = 0;
        bool ok = opts.fallback && polyak_projection(prog, x0, opts.feas_tol, 20000, ops);
        out.arithmetic_ops_estimate += ops;
        out.point = x0;
        out.status = ok ? SolveStatus::feasible : SolveStatus::numerical_failure;
        if (!ok) out.diagnostics += "; projection fallback did not converge\n" + prog.dump();
    }
    out.max_violation = prog.max_violation(out.point);
    return out;
}

constexpr int kNullspaceCheckMax = 200;

FeasibilityResult solve_maximize(const SocProgram& prog, const SolverOptions& opts) {
    prog.validate();
    require(prog.objective.has_value(), "solve_maximize: objective missing");
    const int n = prog.n_vars;
    FormBuilder fb{n, {}, {}, {}, {}, {}};
    add_common_rows(prog, fb, -1);
    ConicForm f = fb.finish(-*prog.objective);
    FeasibilityResult out;
    if (f.rows() == 0) {
        out.status = prog.objective->isZero() ? SolveStatus::feasible : SolveStatus::unbounded;
        out.point = Vec::Zero(n);
        return out;
    }
    // A descent direction in the null space of G leaves every constraint
    // untouched, so a feasible program is unbounded. Checked densely for small n;
    // larger programs in this library always carry variable bounds.
    if (n <= kNullspaceCheckMax) {
        Eigen::FullPivLU<Mat> lu{Mat(f.G)};
        lu.setThreshold(1e-12);
        if (lu.rank() < n) {
            const Mat null = lu.kernel();
            if ((null.transpose() * f.c).norm() > 1e-9 * std::max(1.0, f.c.norm())) {
                SocProgram feas = prog;
                feas.objective.reset();
                FeasibilityResult fr = solve_feasibility(feas, opts);
                out = fr;
                if (fr.status == SolveStatus::feasible) {
                    out.status = SolveStatus::unbounded;
                    out.diagnostics = "objective increases along a direction no constraint limits";
                }
                out.objective = prog.objective->dot(out.point);
                return out;
            }
        }
    }
    IpmResult r = run_ipm(f, opts, nullptr);
    out.iterations = r.iterations;
    out.arithmetic_ops_estimate = r.ops;
    switch (r.exit) {
        case IpmExit::optimal_inaccurate:
            out.diagnostics = "stopped at reduced accuracy";
            [[fallthrough]];
        case IpmExit::optimal:
            out.status = SolveStatus::feasible;
            out.point = clip(prog, r.x / r.tau);
            break;
        case IpmExit::primal_infeasible:
            out.status = SolveStatus::infeasible;
            out.point = clip(prog, Vec::Zero(n));
            break;
        case IpmExit::dual_infeasible:
            out.status = SolveStatus::unbounded;
            out.point = r.x;
            break;
        default:
            out.status = SolveStatus::numerical_failure;
            out.point = r.tau > 0 ? clip(prog, r.x / r.tau) : Vec::Zero(n);
            out.diagnostics = "interior-point breakdown after " + std::to_string(r.iterations) + " iterations\n" +
                              prog.dump();
    }
    out.objective = prog.objective->dot(out.point);
    out.max_violation = prog.max_violation(out.point);
    return out;
}

}  // namespace swipt
