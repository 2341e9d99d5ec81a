#include <spectral/conic.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/SparseCore>

namespace spectral::conic
{
namespace
{

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Early stops whose best iterate is within this factor of every tolerance
// are reported as inaccurate rather than failed.
constexpr double kInaccurateFactor = 100.0;

//
// Internal layout: free scalars are split into nonnegative pairs and kept
// with the SOC coordinates in one dense vector; PSD blocks are full
// symmetric matrices.
//
struct Layout
{
    int n_lin{0};
    std::vector<int> soc_dim;
    std::vector<int> soc_off;
    std::vector<int> psd_dim;
    int n_vec{0};

    struct Map
    {
        BlockKind kind;
        int pos{0};
        int neg{0};
        int index{0};
    };
    std::vector<Map> map;

    double degree() const
    {
        double nu = n_lin + static_cast<double>(soc_dim.size());
        for (int d : psd_dim)
        {
            nu += d;
        }
        return nu;
    }
};

struct Point
{
    VectorXd v;
    std::vector<MatrixXd> m;

    static Point zeros(const Layout& L)
    {
        Point p;
        p.v = VectorXd::Zero(L.n_vec);
        for (int d : L.psd_dim)
        {
            p.m.push_back(MatrixXd::Zero(d, d));
        }
        return p;
    }

    Point& axpy(double a, const Point& o)
    {
        v += a * o.v;
        for (std::size_t b = 0; b < m.size(); ++b)
        {
            m[b] += a * o.m[b];
        }
        return *this;
    }

    double dot(const Point& o) const
    {
        double r = v.dot(o.v);
        for (std::size_t b = 0; b < m.size(); ++b)
        {
            r += m[b].cwiseProduct(o.m[b]).sum();
        }
        return r;
    }

    double norm() const { return std::sqrt(dot(*this)); }
};

Point operator-(const Point& a, const Point& b)
{
    Point r = a;
    r.axpy(-1.0, b);
    return r;
}

struct PsdTerm
{
    int row{0};
    std::vector<int> ii, jj;
    std::vector<double> vv;
    std::vector<int> touched;
    Eigen::SparseMatrix<double, Eigen::RowMajor> sub;
    double fro{0};
};

struct PsdData
{
    int dim{0};
    std::vector<PsdTerm> terms;
    MatrixXd c;
};

struct Data
{
    Layout L;
    int rows{0};
    MatrixXd av;
    VectorXd cv;
    std::vector<PsdData> psd;
    VectorXd b;
    double sign{1.0};
};

Data flatten(const ConicProgram& prog)
{
    Data D;
    Layout& L = D.L;
    const auto& blocks = prog.blocks();
    L.map.resize(blocks.size());

    for (std::size_t k = 0; k < blocks.size(); ++k)
    {
        if (blocks[k].kind == BlockKind::free)
        {
            L.map[k] = {BlockKind::free, L.n_lin, L.n_lin + blocks[k].dim, 0};
            L.n_lin += 2 * blocks[k].dim;
        }
    }
    int off = L.n_lin;
    for (std::size_t k = 0; k < blocks.size(); ++k)
    {
        if (blocks[k].kind == BlockKind::soc)
        {
            L.map[k] = {BlockKind::soc, off, 0, static_cast<int>(L.soc_dim.size())};
            L.soc_dim.push_back(blocks[k].dim);
            L.soc_off.push_back(off);
            off += blocks[k].dim;
        }
    }
    L.n_vec = off;
    for (std::size_t k = 0; k < blocks.size(); ++k)
    {
        if (blocks[k].kind == BlockKind::psd)
        {
            L.map[k] = {BlockKind::psd, 0, 0, static_cast<int>(L.psd_dim.size())};
            L.psd_dim.push_back(blocks[k].dim);
        }
    }

    D.sign = prog.sense() == Sense::minimize ? 1.0 : -1.0;
    D.rows = prog.num_rows();
    D.av   = MatrixXd::Zero(D.rows, L.n_vec);
    D.cv   = VectorXd::Zero(L.n_vec);
    D.b    = VectorXd::Zero(D.rows);
    D.psd.resize(L.psd_dim.size());
    for (std::size_t p = 0; p < L.psd_dim.size(); ++p)
    {
        D.psd[p].dim = L.psd_dim[p];
        D.psd[p].c   = MatrixXd::Zero(L.psd_dim[p], L.psd_dim[p]);
    }

    for (const Term& t : prog.objective())
    {
        const auto& mp   = L.map[static_cast<std::size_t>(t.var.block)];
        const double c   = D.sign * t.coef;
        switch (mp.kind)
        {
        case BlockKind::free:
            D.cv(mp.pos + t.var.i) += c;
            D.cv(mp.neg + t.var.i) -= c;
            break;
        case BlockKind::soc:
            D.cv(mp.pos + t.var.i) += c;
            break;
        case BlockKind::psd:
        {
            MatrixXd& C = D.psd[static_cast<std::size_t>(mp.index)].c;
            if (t.var.i == t.var.j)
            {
                C(t.var.i, t.var.j) += c;
            }
            else
            {
                C(t.var.i, t.var.j) += 0.5 * c;
                C(t.var.j, t.var.i) += 0.5 * c;
            }
            break;
        }
        }
    }

    for (int r = 0; r < D.rows; ++r)
    {
        const Row& row = prog.rows()[static_cast<std::size_t>(r)];
        D.b(r)         = row.rhs;
        std::map<std::pair<int, std::pair<int, int>>, double> psd_acc;
        for (const Term& t : row.terms)
        {
            const auto& mp = L.map[static_cast<std::size_t>(t.var.block)];
            switch (mp.kind)
            {
            case BlockKind::free:
                D.av(r, mp.pos + t.var.i) += t.coef;
                D.av(r, mp.neg + t.var.i) -= t.coef;
                break;
            case BlockKind::soc:
                D.av(r, mp.pos + t.var.i) += t.coef;
                break;
            case BlockKind::psd:
                psd_acc[{mp.index, {std::min(t.var.i, t.var.j), std::max(t.var.i, t.var.j)}}] += t.coef;
                break;
            }
        }
        PsdTerm* cur   = nullptr;
        int cur_block  = -1;
        for (const auto& [key, val] : psd_acc)
        {
            if (val == 0.0)
            {
                continue;
            }
            if (key.first != cur_block)
            {
                cur_block = key.first;
                auto& terms = D.psd[static_cast<std::size_t>(cur_block)].terms;
                terms.push_back({});
                cur      = &terms.back();
                cur->row = r;
            }
            cur->ii.push_back(key.second.first);
            cur->jj.push_back(key.second.second);
            cur->vv.push_back(val);
        }
    }

    // Row-restricted symmetric coefficient matrices for the Schur complement.
    for (auto& blk : D.psd)
    {
        for (auto& t : blk.terms)
        {
            std::vector<int> idx = t.ii;
            idx.insert(idx.end(), t.jj.begin(), t.jj.end());
            std::sort(idx.begin(), idx.end());
            idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
            t.touched = idx;

            std::vector<int> pos(static_cast<std::size_t>(blk.dim), -1);
            for (std::size_t a = 0; a < idx.size(); ++a)
            {
                pos[static_cast<std::size_t>(idx[a])] = static_cast<int>(a);
            }
            std::vector<Eigen::Triplet<double>> trip;
            double fro2 = 0.0;
            for (std::size_t e = 0; e < t.vv.size(); ++e)
            {
                const int i = t.ii[e];
                const int j = t.jj[e];
                if (i == j)
                {
                    trip.emplace_back(pos[static_cast<std::size_t>(i)], j, t.vv[e]);
                    fro2 += t.vv[e] * t.vv[e];
                }
                else
                {
                    trip.emplace_back(pos[static_cast<std::size_t>(i)], j, 0.5 * t.vv[e]);
                    trip.emplace_back(pos[static_cast<std::size_t>(j)], i, 0.5 * t.vv[e]);
                    fro2 += 0.5 * t.vv[e] * t.vv[e];
                }
            }
            t.sub.resize(static_cast<Index>(idx.size()), blk.dim);
            t.sub.setFromTriplets(trip.begin(), trip.end());
            t.fro = std::sqrt(fro2);
        }
    }
    return D;
}

VectorXd apply_a(const Data& D, const Point& x)
{
    VectorXd y = D.av * x.v;
    for (std::size_t p = 0; p < D.psd.size(); ++p)
    {
        const MatrixXd& X = x.m[p];
        for (const auto& t : D.psd[p].terms)
        {
            double acc = 0.0;
            for (std::size_t e = 0; e < t.vv.size(); ++e)
            {
                acc += t.vv[e] * X(t.ii[e], t.jj[e]);
            }
            y(t.row) += acc;
        }
    }
    return y;
}

Point apply_at(const Data& D, const VectorXd& y)
{
    Point p;
    p.v = D.av.transpose() * y;
    for (const auto& blk : D.psd)
    {
        MatrixXd M = MatrixXd::Zero(blk.dim, blk.dim);
        for (const auto& t : blk.terms)
        {
            const double w = y(t.row);
            if (w == 0.0)
            {
                continue;
            }
            for (std::size_t e = 0; e < t.vv.size(); ++e)
            {
                const int i = t.ii[e];
                const int j = t.jj[e];
                if (i == j)
                {
                    M(i, i) += w * t.vv[e];
                }
                else
                {
                    M(i, j) += 0.5 * w * t.vv[e];
                    M(j, i) += 0.5 * w * t.vv[e];
                }
            }
        }
        p.m.push_back(std::move(M));
    }
    return p;
}

Point objective_point(const Data& D)
{
    Point c;
    c.v = D.cv;
    for (const auto& blk : D.psd)
    {
        c.m.push_back(blk.c);
    }
    return c;
}

//
// Nesterov-Todd scaling. For each cone a map W_s with W_s s = W_s^{-*} x
// = lambda; H = W_s^* W_s maps dual directions to primal ones.
//
struct Scaling
{
    VectorXd lin_w;
    std::vector<MatrixXd> soc_w;
    std::vector<MatrixXd> r;
    std::vector<MatrixXd> w;
    VectorXd lam_vec;
    std::vector<VectorXd> lam_psd;
};

double soc_det(const Eigen::Ref<const VectorXd>& u)
{
    return u(0) * u(0) - u.tail(u.size() - 1).squaredNorm();
}

/// Some F with F F^T = M. Falls back to an eigendecomposition with tiny
/// eigenvalues lifted when roundoff has pushed M just outside the cone.
bool psd_factor(const MatrixXd& m, MatrixXd& f)
{
    Eigen::LLT<MatrixXd> llt(m);
    if (llt.info() == Eigen::Success)
    {
        f = llt.matrixL();
        return true;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
    const VectorXd ev = es.eigenvalues();
    const double top  = ev.maxCoeff();
    if (!(top > 0.0))
    {
        return false;
    }
    const double floor_ = 1e-14 * top;
    if (ev.minCoeff() < -1e-8 * top)
    {
        return false;
    }
    f = es.eigenvectors() * ev.cwiseMax(floor_).cwiseSqrt().asDiagonal();
    return true;
}

bool compute_scaling(const Layout& L, const Point& x, const Point& s, Scaling& sc)
{
    sc.lin_w.resize(L.n_lin);
    sc.lam_vec.resize(L.n_vec);
    for (int i = 0; i < L.n_lin; ++i)
    {
        if (!(x.v(i) > 0.0) || !(s.v(i) > 0.0))
        {
            return false;
        }
        sc.lin_w(i)   = std::sqrt(x.v(i) / s.v(i));
        sc.lam_vec(i) = std::sqrt(x.v(i) * s.v(i));
    }

    sc.soc_w.resize(L.soc_dim.size());
    for (std::size_t c = 0; c < L.soc_dim.size(); ++c)
    {
        const int d   = L.soc_dim[c];
        const int off = L.soc_off[c];
        const VectorXd xs = x.v.segment(off, d);
        const VectorXd ss = s.v.segment(off, d);
        const double xd = soc_det(xs);
        const double sd = soc_det(ss);
        if (!(xs(0) > 0.0) || !(ss(0) > 0.0) || !(xd > 0.0) || !(sd > 0.0))
        {
            return false;
        }
        const double beta = std::pow(xd / sd, 0.25);
        const VectorXd xn = xs / std::sqrt(xd);
        const VectorXd sn = ss / std::sqrt(sd);
        const double gamma = std::sqrt(0.5 * (1.0 + xn.dot(sn)));
        VectorXd wbar = xn;
        wbar(0) += sn(0);
        wbar.tail(d - 1) -= sn.tail(d - 1);
        wbar /= 2.0 * gamma;
        VectorXd v = wbar;
        v(0) += 1.0;
        v /= std::sqrt(2.0 * (wbar(0) + 1.0));
        MatrixXd W = 2.0 * v * v.transpose();
        W(0, 0) -= 1.0;
        for (int i = 1; i < d; ++i)
        {
            W(i, i) += 1.0;
        }
        W *= beta;
        sc.lam_vec.segment(off, d) = W * ss;
        sc.soc_w[c] = std::move(W);
    }

    sc.r.resize(L.psd_dim.size());
    sc.w.resize(L.psd_dim.size());
    sc.lam_psd.resize(L.psd_dim.size());
    for (std::size_t p = 0; p < L.psd_dim.size(); ++p)
    {
        MatrixXd Lx, Ls;
        if (!psd_factor(x.m[p], Lx) || !psd_factor(s.m[p], Ls))
        {
            return false;
        }
        const MatrixXd prod = Ls.transpose() * Lx;
        Eigen::BDCSVD<MatrixXd> svd(prod, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const VectorXd lam = svd.singularValues();
        if (!(lam.minCoeff() > 0.0))
        {
            return false;
        }
        sc.r[p] = Lx * svd.matrixV() * lam.cwiseSqrt().cwiseInverse().asDiagonal();
        sc.w[p] = sc.r[p] * sc.r[p].transpose();
        sc.lam_psd[p] = lam;
    }
    return true;
}

Point apply_ws(const Layout& L, const Scaling& sc, const Point& d)
{
    Point o;
    o.v.resize(L.n_vec);
    o.v.head(L.n_lin) = sc.lin_w.cwiseProduct(d.v.head(L.n_lin));
    for (std::size_t c = 0; c < L.soc_dim.size(); ++c)
    {
        o.v.segment(L.soc_off[c], L.soc_dim[c]) =
            sc.soc_w[c] * d.v.segment(L.soc_off[c], L.soc_dim[c]);
    }
    for (std::size_t p = 0; p < L.psd_dim.size(); ++p)
    {
        o.m.push_back(sc.r[p].transpose() * d.m[p] * sc.r[p]);
    }
    return o;
}

Point apply_ws_adjoint(const Layout& L, const Scaling& sc, const Point& t)
{
    Point o;
    o.v.resize(L.n_vec);
    o.v.head(L.n_lin) = sc.lin_w.cwiseProduct(t.v.head(L.n_lin));
    for (std::size_t c = 0; c < L.soc_dim.size(); ++c)
    {
        o.v.segment(L.soc_off[c], L.soc_dim[c]) =
            sc.soc_w[c] * t.v.segment(L.soc_off[c], L.soc_dim[c]);
    }
    for (std::size_t p = 0; p < L.psd_dim.size(); ++p)
    {
        o.m.push_back(sc.r[p] * t.m[p] * sc.r[p].transpose());
    }
    return o;
}

Point lambda_point(const Layout& L, const Scaling& sc)
{
    Point p;
    p.v = sc.lam_vec;
    for (std::size_t b = 0; b < L.psd_dim.size(); ++b)
    {
        p.m.push_back(sc.lam_psd[b].asDiagonal());
    }
    return p;
}

Point identity_point(const Layout& L)
{
    Point e = Point::zeros(L);
    e.v.head(L.n_lin).setOnes();
    for (std::size_t c = 0; c < L.soc_dim.size(); ++c)
    {
        e.v(L.soc_off[c]) = 1.0;
    }
    for (auto& m : e.m)
    {
        m.setIdentity();
    }
    return e;
}

Point jordan(const Layout& L, const Point& u, const Point& v)
{
    Point o;
    o.v.resize(L.n_vec);
    o.v.head(L.n_lin) = u.v.head(L.n_lin).cwiseProduct(v.v.head(L.n_lin));
    for (std::size_t c = 0; c < L.soc_dim.size(); ++c)
    {
        const int off = L.soc_off[c];
        const int d   = L.soc_dim[c];
        const auto us = u.v.segment(off, d);
        const auto vs = v.v.segment(off, d);
        o.v(off) = us.dot(vs);
        o.v.segment(off + 1, d - 1) = us(0) * vs.tail(d - 1) + vs(0) * us.tail(d - 1);
    }
    for (std::size_t p = 0; p < L.psd_dim.size(); ++p)
    {
        const MatrixXd uv = u.m[p] * v.m[p];
        o.m.push_back(0.5 * (uv + uv.transpose()));
    }
    return o;
}

/// Solves lambda o t = r for t.
Point lambda_solve(const Layout& L, const Scaling& sc, const Point& r)
{
    Point t;
    t.v.resize(L.n_vec);
    t.v.head(L.n_lin) = r.v.head(L.n_lin).cwiseQuotient(sc.lam_vec.head(L.n_lin));
    for (std::size_t c = 0; c < L.soc_dim.size(); ++c)
    {
        const int off = L.soc_off[c];
        const int d   = L.soc_dim[c];
        const auto lam = sc.lam_vec.segment(off, d);
        const auto rs  = r.v.segment(off, d);
        const double det = soc_det(lam);
        const double t0 = (lam(0) * rs(0) - lam.tail(d - 1).dot(rs.tail(d - 1))) / det;
        t.v(off) = t0;
        t.v.segment(off + 1, d - 1) = (rs.tail(d - 1) - t0 * lam.tail(d - 1)) / lam(0);
    }
    for (std::size_t p = 0; p < L.psd_dim.size(); ++p)
    {
        const VectorXd& lam = sc.lam_psd[p];
        const Index d = lam.size();
        MatrixXd m(d, d);
        for (Index j = 0; j < d; ++j)
        {
            for (Index i = 0; i < d; ++i)
            {
                m(i, j) = 2.0 * r.m[p](i, j) / (lam(i) + lam(j));
            }
        }
        t.m.push_back(std::move(m));
    }
    return t;
}

/// Largest step a with lambda + a d in the cone (inf if unbounded).
double max_step(const Layout& L, const Scaling& sc, const Point& d)
{
    double amax = kInf;
    for (int i = 0; i < L.n_lin; ++i)
    {
        if (d.v(i) < 0.0)
        {
            amax = std::min(amax, -sc.lam_vec(i) / d.v(i));
        }
    }
    for (std::size_t c = 0; c < L.soc_dim.size(); ++c)
    {
        const int off = L.soc_off[c];
        const int n   = L.soc_dim[c];
        const auto lam = sc.lam_vec.segment(off, n);
        const auto ds  = d.v.segment(off, n);
        const double a  = soc_det(ds);
        const double bq = lam(0) * ds(0) - lam.tail(n - 1).dot(ds.tail(n - 1));
        const double c0 = soc_det(lam);
        const double disc = bq * bq - a * c0;
        if (a < 0.0 || (bq < 0.0 && disc >= 0.0))
        {
            const double denom = -bq + std::sqrt(std::max(disc, 0.0));
            if (denom > 0.0)
            {
                amax = std::min(amax, c0 / denom);
            }
            else
            {
                amax = 0.0;
            }
        }
    }
    for (std::size_t p = 0; p < L.psd_dim.size(); ++p)
    {
        const VectorXd s = sc.lam_psd[p].cwiseSqrt().cwiseInverse();
        const MatrixXd scaled = s.asDiagonal() * d.m[p] * s.asDiagonal();
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(scaled, Eigen::EigenvaluesOnly);
        const double emin = es.eigenvalues()(0);
        if (emin < 0.0)
        {
            amax = std::min(amax, -1.0 / emin);
        }
    }
    return amax;
}

double cone_violation(const Layout& L, const Point& x)
{
    double viol = 0.0;
    for (int i = 0; i < L.n_lin; ++i)
    {
        viol = std::max(viol, -x.v(i));
    }
    for (std::size_t c = 0; c < L.soc_dim.size(); ++c)
    {
        const auto xs = x.v.segment(L.soc_off[c], L.soc_dim[c]);
        viol = std::max(viol, xs.tail(xs.size() - 1).norm() - xs(0));
    }
    for (const auto& m : x.m)
    {
        if (m.rows() == 0)
        {
            continue;
        }
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
        viol = std::max(viol, -es.eigenvalues()(0));
    }
    return viol;
}

/// Lower triangle of A H A^T.
MatrixXd schur_complement(const Data& D, const Scaling& sc)
{
    const Layout& L = D.L;
    MatrixXd M = MatrixXd::Zero(D.rows, D.rows);

    if (L.n_vec > 0 && D.rows > 0)
    {
        MatrixXd aw(D.rows, L.n_vec);
        aw.leftCols(L.n_lin) = D.av.leftCols(L.n_lin) * sc.lin_w.asDiagonal();
        for (std::size_t c = 0; c < L.soc_dim.size(); ++c)
        {
            aw.middleCols(L.soc_off[c], L.soc_dim[c]).noalias() =
                D.av.middleCols(L.soc_off[c], L.soc_dim[c]) * sc.soc_w[c];
        }
        M.selfadjointView<Eigen::Lower>().rankUpdate(aw);
    }

    for (std::size_t p = 0; p < D.psd.size(); ++p)
    {
        const PsdData& blk = D.psd[p];
        const MatrixXd& W  = sc.w[p];
        MatrixXd G;
        for (std::size_t k = 0; k < blk.terms.size(); ++k)
        {
            const PsdTerm& tk = blk.terms[k];
            const MatrixXd tr = tk.sub * W;
            MatrixXd wr(W.rows(), static_cast<Index>(tk.touched.size()));
            for (std::size_t a = 0; a < tk.touched.size(); ++a)
            {
                wr.col(static_cast<Index>(a)) = W.col(tk.touched[a]);
            }
            G.noalias() = wr * tr;
            for (std::size_t l = k; l < blk.terms.size(); ++l)
            {
                const PsdTerm& tl = blk.terms[l];
                double acc = 0.0;
                for (std::size_t e = 0; e < tl.vv.size(); ++e)
                {
                    acc += tl.vv[e] * G(tl.ii[e], tl.jj[e]);
                }
                const int r1 = std::max(tk.row, tl.row);
                const int r2 = std::min(tk.row, tl.row);
                M(r1, r2) += acc;
            }
        }
    }
    return M;
}

struct Direction
{
    Point dx, ds, dxs, dss;
    VectorXd dy;
};

class NewtonSystem
{
public:
    NewtonSystem(const Data& D, const Scaling& sc) : D_(D), sc_(sc)
    {
        MatrixXd M = schur_complement(D, sc);
        double reg = 0.0;
        const double diag_max =
            D.rows > 0 ? std::max(1.0, M.diagonal().cwiseAbs().maxCoeff()) : 1.0;
        for (int attempt = 0; attempt < 8; ++attempt)
        {
            MatrixXd Mr = M;
            Mr.diagonal().array() += reg;
            llt_.compute(Mr);
            if (llt_.info() == Eigen::Success)
            {
                ok_ = true;
                return;
            }
            reg = reg == 0.0 ? 1e-14 * diag_max : reg * 100.0;
        }
    }

    bool ok() const { return ok_; }

    Direction solve(const VectorXd& rp, const Point& rd, const Point& t) const
    {
        const Layout& L = D_.L;
        Point u = t - apply_ws(L, sc_, rd);
        const VectorXd rhs = rp - apply_a(D_, apply_ws_adjoint(L, sc_, u));
        Direction dir;
        dir.dy = D_.rows > 0 ? VectorXd(llt_.solve(rhs)) : VectorXd();
        // The assembled Schur matrix loses accuracy near the boundary; a few
        // refinement passes against the exact operator keep A dx consistent.
        for (int pass = 0; pass < 3 && D_.rows > 0; ++pass)
        {
            const VectorXd r = rhs - apply_schur(dir.dy);
            if (r.norm() <= 1e-15 * (1.0 + rhs.norm()))
            {
                break;
            }
            dir.dy += llt_.solve(r);
        }
        dir.ds  = rd - apply_at(D_, dir.dy);
        dir.dss = apply_ws(L, sc_, dir.ds);
        dir.dxs = t - dir.dss;
        dir.dx  = apply_ws_adjoint(L, sc_, dir.dxs);
        return dir;
    }

private:
    VectorXd apply_schur(const VectorXd& y) const
    {
        const Layout& L = D_.L;
        return apply_a(D_, apply_ws_adjoint(L, sc_, apply_ws(L, sc_, apply_at(D_, y))));
    }

    const Data& D_;
    const Scaling& sc_;
    Eigen::LLT<MatrixXd, Eigen::Lower> llt_;
    bool ok_{false};
};

void initial_point(const Data& D, Point& x, Point& s)
{
    const Layout& L = D.L;
    x = identity_point(L);
    s = identity_point(L);

    auto scale_for = [&](int dim, const VectorXd& row_norms, double cnorm) {
        double cx = 0.0;
        double an = 0.0;
        for (int r = 0; r < D.rows; ++r)
        {
            if (row_norms(r) > 0.0)
            {
                cx = std::max(cx, (1.0 + std::abs(D.b(r))) / (1.0 + row_norms(r)));
                an = std::max(an, row_norms(r));
            }
        }
        const double sd = std::sqrt(static_cast<double>(dim));
        const double xi_x = std::max({10.0, sd, dim * cx});
        const double xi_s = std::max({10.0, sd, an, cnorm});
        return std::pair{xi_x, xi_s};
    };

    if (L.n_lin > 0)
    {
        const VectorXd rn = D.av.leftCols(L.n_lin).rowwise().norm();
        const auto [ax, as] = scale_for(1, rn, D.cv.head(L.n_lin).norm());
        x.v.head(L.n_lin) *= ax;
        s.v.head(L.n_lin) *= as;
    }
    for (std::size_t c = 0; c < L.soc_dim.size(); ++c)
    {
        const int off = L.soc_off[c];
        const int d   = L.soc_dim[c];
        const VectorXd rn = D.av.middleCols(off, d).rowwise().norm();
        const auto [ax, as] = scale_for(1, rn, D.cv.segment(off, d).norm());
        x.v.segment(off, d) *= ax;
        s.v.segment(off, d) *= as;
    }
    for (std::size_t p = 0; p < L.psd_dim.size(); ++p)
    {
        VectorXd rn = VectorXd::Zero(D.rows);
        for (const auto& t : D.psd[p].terms)
        {
            rn(t.row) = t.fro;
        }
        const auto [ax, as] = scale_for(L.psd_dim[p], rn, D.psd[p].c.norm());
        x.m[p] *= ax;
        s.m[p] *= as;
    }
}

ConicSolution package(const ConicProgram& prog, const Data& D, const Point& x,
                      const Point& s, const VectorXd& y, Status status,
                      int iterations, double pobj, double dobj,
                      const Residuals& res)
{
    ConicSolution sol;
    sol.status           = status;
    sol.iterations       = iterations;
    sol.primal_objective = D.sign * pobj;
    sol.dual_objective   = D.sign * dobj;
    sol.multipliers      = D.sign * y;
    sol.residuals        = res;
    const auto& blocks = prog.blocks();
    for (std::size_t k = 0; k < blocks.size(); ++k)
    {
        const auto& mp = D.L.map[k];
        const int dim  = blocks[k].dim;
        switch (mp.kind)
        {
        case BlockKind::free:
        {
            sol.values.emplace_back(x.v.segment(mp.pos, dim) - x.v.segment(mp.neg, dim));
            const VectorXd sl = 0.5 * (s.v.segment(mp.pos, dim) - s.v.segment(mp.neg, dim));
            sol.slacks.emplace_back(D.sign * sl);
            break;
        }
        case BlockKind::soc:
            sol.values.emplace_back(x.v.segment(mp.pos, dim));
            sol.slacks.emplace_back(D.sign * s.v.segment(mp.pos, dim));
            break;
        case BlockKind::psd:
            sol.values.push_back(x.m[static_cast<std::size_t>(mp.index)]);
            sol.slacks.push_back(D.sign * s.m[static_cast<std::size_t>(mp.index)]);
            break;
        }
    }
    return sol;
}

} // namespace

ConicSolution solve(const ConicProgram& prog, const Tolerances& tol)
{
    const Data D    = flatten(prog);
    const Layout& L = D.L;
    const double nu = L.degree();

    if (nu == 0.0)
    {
        // Nothing to optimize; only an all-zero system can be consistent.
        const bool consistent = D.rows == 0 || D.b.cwiseAbs().maxCoeff() == 0.0;
        Point x = Point::zeros(L);
        return package(prog, D, x, x, VectorXd::Zero(D.rows),
                       consistent ? Status::optimal : Status::infeasible, 0,
                       0.0, 0.0, {});
    }

    Point x, s;
    initial_point(D, x, s);
    VectorXd y = VectorXd::Zero(D.rows);

    const Point c     = objective_point(D);
    const double bnrm = 1.0 + D.b.norm();
    const double cnrm = 1.0 + c.norm();
    const Point e     = identity_point(L);

    struct Snapshot
    {
        Point x, s;
        VectorXd y;
        double pobj{0}, dobj{0};
        Residuals res;
        double merit{kInf};
        int iter{0};
    } best;

    Status status = Status::max_iter;
    int iter   = 0;
    int stalls = 0;

    for (; iter <= tol.max_iter; ++iter)
    {
        const VectorXd rp = D.b - apply_a(D, x);
        Point rd = c - apply_at(D, y);
        rd.axpy(-1.0, s);
        const double pobj  = c.dot(x);
        const double dobj  = D.b.dot(y);
        const double gap   = x.dot(s);
        const double mu    = gap / nu;
        const double denom = 1.0 + std::abs(pobj) + std::abs(dobj);

        Residuals res;
        res.equality      = rp.norm() / bnrm;
        res.dual_equality = rd.norm() / cnrm;
        res.gap           = std::max(std::abs(pobj - dobj), gap) / denom;

        if (tol.verbose)
        {
            std::fprintf(stderr, "%3d  p=% .9e d=% .9e  rp=%.2e rd=%.2e gap=%.2e\n",
                         iter, D.sign * pobj, D.sign * dobj, res.equality,
                         res.dual_equality, res.gap);
        }

        const double merit = std::max({res.equality / tol.eq,
                                       res.dual_equality / tol.eq,
                                       res.gap / tol.gap});
        if (merit < best.merit)
        {
            stalls = merit < 0.9 * best.merit ? 0 : stalls + 1;
            best   = {x, s, y, pobj, dobj, res, merit, iter};
        }
        else
        {
            ++stalls;
        }

        if (merit <= 1.0)
        {
            status = Status::optimal;
            break;
        }
        // Divergence certificates (normalized by the growing objective).
        if (dobj > 0.0 && (c - rd).norm() / dobj < 1e-9 && iter > 5)
        {
            status = Status::infeasible;
            break;
        }
        if (pobj < 0.0 && (D.b - rp).norm() / -pobj < 1e-9 && iter > 5)
        {
            status = Status::unbounded;
            break;
        }
        if (iter == tol.max_iter)
        {
            break;
        }
        if (stalls >= 8)
        {
            if (tol.verbose)
            {
                std::fprintf(stderr, "no progress\n");
            }
            status = Status::numerical_error;
            break;
        }

        Scaling sc;
        if (!compute_scaling(L, x, s, sc))
        {
            if (tol.verbose)
            {
                std::fprintf(stderr, "scaling failed\n");
            }
            status = Status::numerical_error;
            break;
        }
        const NewtonSystem sys(D, sc);
        if (!sys.ok())
        {
            if (tol.verbose)
            {
                std::fprintf(stderr, "Schur factorization failed\n");
            }
            status = Status::numerical_error;
            break;
        }
        const Point lam = lambda_point(L, sc);

        // Predictor.
        Point t_aff = lam;
        t_aff.axpy(-2.0, lam);
        const Direction aff = sys.solve(rp, rd, t_aff);
        const double a_aff = std::min(
            1.0, std::min(max_step(L, sc, aff.dxs), max_step(L, sc, aff.dss)));
        Point xa = lam;
        xa.axpy(a_aff, aff.dxs);
        Point sa = lam;
        sa.axpy(a_aff, aff.dss);
        const double mu_aff = xa.dot(sa) / nu;
        const double sigma  = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

        // Corrector.
        Point rc = jordan(L, lam, lam);
        rc.axpy(1.0, jordan(L, aff.dxs, aff.dss));
        Point target = e;
        for (auto& m : target.m)
        {
            m *= sigma * mu;
        }
        target.v *= sigma * mu;
        const Point t = lambda_solve(L, sc, target - rc);
        const Direction dir = sys.solve(rp, rd, t);

        const double alpha = std::min(
            1.0, 0.99 * std::min(max_step(L, sc, dir.dxs), max_step(L, sc, dir.dss)));
        if (!(alpha > 1e-12))
        {
            if (tol.verbose)
            {
                std::fprintf(stderr, "step length collapsed\n");
            }
            status = Status::numerical_error;
            break;
        }
        x.axpy(alpha, dir.dx);
        s.axpy(alpha, dir.ds);
        y += alpha * dir.dy;
    }

    if (status == Status::numerical_error || status == Status::max_iter)
    {
        // Report the best iterate; close enough counts as inaccurate.
        if (best.merit <= kInaccurateFactor)
        {
            status = Status::inaccurate;
        }
    }
    else if (status == Status::optimal)
    {
        best.iter = iter;
    }
    best.res.cone = cone_violation(L, best.x);
    return package(prog, D, best.x, best.s, best.y, status, iter, best.pobj,
                   best.dobj, best.res);
}

} // namespace spectral::conic
