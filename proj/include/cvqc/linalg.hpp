// Dense real/complex kernels used by the compiler: Jacobi symmetric
// eigensolver, SVD, inverse-square-root P(K), simultaneous-measurement plans
// and Givens factorization of orthogonal networks.  Everything is
// deterministic: fixed sweep orders, descending spectra, and eigenvector
// signs fixed by the largest-magnitude component.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "cvqc/rng.hpp"

namespace cvqc::linalg {

using cdouble = std::complex<double>;

class Mat {
  public:
    Mat() : r_(0), c_(0) {}
    Mat(int r, int c) : r_(r), c_(c), a_(std::size_t(r) * c, 0.0) {}

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return r_; }
    int cols() const { return c_; }
    double& operator()(int i, int j) { return a_[std::size_t(i) * c_ + j]; }
    double operator()(int i, int j) const { return a_[std::size_t(i) * c_ + j]; }

    Mat transpose() const {
        Mat t(c_, r_);
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend Mat operator*(const Mat& a, const Mat& b) {
        if (a.c_ != b.r_) throw std::invalid_argument("mat: size mismatch in product");
        Mat out(a.r_, b.c_);
        for (int i = 0; i < a.r_; ++i)
            for (int k = 0; k < a.c_; ++k) {
                double v = a(i, k);
                if (v == 0.0) continue;
                for (int j = 0; j < b.c_; ++j) out(i, j) += v * b(k, j);
            }
        return out;
    }
    friend Mat operator+(const Mat& a, const Mat& b) {
        Mat out(a.r_, a.c_);
        for (std::size_t i = 0; i < a.a_.size(); ++i) out.a_[i] = a.a_[i] + b.a_[i];
        return out;
    }
    friend Mat operator-(const Mat& a, const Mat& b) {
        Mat out(a.r_, a.c_);
        for (std::size_t i = 0; i < a.a_.size(); ++i) out.a_[i] = a.a_[i] - b.a_[i];
        return out;
    }
    Mat scaled(double s) const {
        Mat out = *this;
        for (auto& v : out.a_) v *= s;
        return out;
    }

    std::vector<double> apply(const std::vector<double>& x) const {
        std::vector<double> y(r_, 0.0);
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j) y[i] += (*this)(i, j) * x[j];
        return y;
    }

    double norm_inf() const {
        double m = 0;
        for (auto v : a_) m = std::max(m, std::abs(v));
        return m;
    }

    bool is_orthogonal(double tol = 1e-10) const {
        if (r_ != c_) return false;
        return (transpose() * *this - identity(c_)).norm_inf() < tol;
    }

  private:
    int r_, c_;
    std::vector<double> a_;
};

class CMat {
  public:
    CMat() : r_(0), c_(0) {}
    CMat(int r, int c) : r_(r), c_(c), a_(std::size_t(r) * c) {}

    static CMat identity(int n) {
        CMat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static CMat from_real(const Mat& m) {
        CMat out(m.rows(), m.cols());
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
        return out;
    }

    int rows() const { return r_; }
    int cols() const { return c_; }
    cdouble& operator()(int i, int j) { return a_[std::size_t(i) * c_ + j]; }
    cdouble operator()(int i, int j) const { return a_[std::size_t(i) * c_ + j]; }

    CMat adjoint() const {
        CMat t(c_, r_);
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j) t(j, i) = std::conj((*this)(i, j));
        return t;
    }
    CMat transpose() const {
        CMat t(c_, r_);
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend CMat operator*(const CMat& a, const CMat& b) {
        if (a.c_ != b.r_) throw std::invalid_argument("cmat: size mismatch in product");
        CMat out(a.r_, b.c_);
        for (int i = 0; i < a.r_; ++i)
            for (int k = 0; k < a.c_; ++k) {
                cdouble v = a(i, k);
                if (v == 0.0) continue;
                for (int j = 0; j < b.c_; ++j) out(i, j) += v * b(k, j);
            }
        return out;
    }
    friend CMat operator-(const CMat& a, const CMat& b) {
        CMat out(a.r_, a.c_);
        for (std::size_t i = 0; i < a.a_.size(); ++i) out.a_[i] = a.a_[i] - b.a_[i];
        return out;
    }
    CMat scaled(cdouble s) const {
        CMat out = *this;
        for (auto& v : out.a_) v *= s;
        return out;
    }

    Mat real() const {
        Mat out(r_, c_);
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j) out(i, j) = (*this)(i, j).real();
        return out;
    }
    Mat imag() const {
        Mat out(r_, c_);
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j) out(i, j) = (*this)(i, j).imag();
        return out;
    }

    double norm_inf() const {
        double m = 0;
        for (auto& v : a_) m = std::max(m, std::abs(v));
        return m;
    }

    bool is_unitary(double tol = 1e-10) const {
        if (r_ != c_) return false;
        return (adjoint() * *this - identity(c_)).norm_inf() < tol;
    }

  private:
    int r_, c_;
    std::vector<cdouble> a_;
};

// ---- symmetric eigendecomposition (cyclic Jacobi) ----

struct EigSym {
    std::vector<double> values; // descending
    Mat vectors;                // columns are eigenvectors, A = V diag V^T
};

inline EigSym eig_sym(Mat A) {
    if (A.rows() != A.cols()) throw std::invalid_argument("eig_sym: square matrix required");
    int n = A.rows();
    Mat V = Mat::identity(n);
    auto offdiag = [&A, n] {
        double s = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s = std::max(s, std::abs(A(i, j)));
        return s;
    };
    double scale = std::max(1.0, A.norm_inf());
    for (int sweep = 0; sweep < 100 && offdiag() > 1e-15 * scale; ++sweep) {
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                double apq = A(p, q);
                if (std::abs(apq) <= 1e-18 * scale) continue;
                double theta = 0.5 * std::atan2(2.0 * apq, A(q, q) - A(p, p));
                // rotation angle that annihilates A(p,q)
                double c = std::cos(theta), s = std::sin(theta);
                for (int k = 0; k < n; ++k) {
                    double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
    }
    EigSym out;
    out.values.resize(n);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::vector<double> diag(n);
    for (int i = 0; i < n; ++i) diag[i] = A(i, i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return diag[a] > diag[b]; });
    Mat W(n, n);
    for (int j = 0; j < n; ++j) {
        int src = order[j];
        // sign convention: largest-magnitude component positive
        int imax = 0;
        for (int i = 1; i < n; ++i)
            if (std::abs(V(i, src)) > std::abs(V(imax, src))) imax = i;
        double sgn = V(imax, src) < 0 ? -1.0 : 1.0;
        for (int i = 0; i < n; ++i) W(i, j) = sgn * V(i, src);
        out.values[j] = diag[src];
    }
    out.vectors = W;
    return out;
}

// ---- SVD: K = O'^T Sigma O with descending singular values ----

struct Svd {
    Mat oprime; // r x r orthogonal
    std::vector<double> sigma;
    Mat o; // c x c orthogonal
};

namespace detail {

// Complete `cols` orthonormal columns (already orthonormal) of an r x r
// matrix to a full basis with canonical seeds e_0, e_1, ...
inline void complete_basis(Mat& U, int cols) {
    int n = U.rows();
    int have = cols;
    for (int seed = 0; seed < n && have < n; ++seed) {
        std::vector<double> v(n, 0.0);
        v[seed] = 1.0;
        for (int rep = 0; rep < 2; ++rep)
            for (int j = 0; j < have; ++j) {
                double dot = 0;
                for (int i = 0; i < n; ++i) dot += v[i] * U(i, j);
                for (int i = 0; i < n; ++i) v[i] -= dot * U(i, j);
            }
        double norm = 0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        if (norm < 1e-8) continue;
        for (int i = 0; i < n; ++i) U(i, have) = v[i] / norm;
        ++have;
    }
    if (have < n) throw std::runtime_error("basis completion failed");
}

} // namespace detail

inline Svd svd(const Mat& K) {
    int r = K.rows(), c = K.cols();
    EigSym eg = eig_sym(K.transpose() * K);
    Mat V = eg.vectors; // c x c
    int nsv = std::min(r, c);
    std::vector<double> sigma(nsv, 0.0);
    for (int i = 0; i < nsv; ++i) sigma[i] = std::sqrt(std::max(0.0, eg.values[i]));
    Mat U(r, r);
    double tol = 1e-12 * std::max(1.0, K.norm_inf());
    int have = 0;
    for (int i = 0; i < nsv; ++i) {
        if (sigma[i] <= tol) break;
        for (int row = 0; row < r; ++row) {
            double acc = 0;
            for (int k = 0; k < c; ++k) acc += K(row, k) * V(k, i);
            U(row, have) = acc / sigma[i];
        }
        ++have;
    }
    detail::complete_basis(U, have);
    Svd out;
    out.oprime = U.transpose();
    out.sigma = std::move(sigma);
    out.o = V.transpose();
    return out;
}

inline Mat svd_reconstruct(const Svd& s, int r, int c) {
    Mat Sig(r, c);
    for (int i = 0; i < int(s.sigma.size()); ++i) Sig(i, i) = s.sigma[i];
    return s.oprime.transpose() * Sig * s.o;
}

// P(K) = (I + K^T K)^(-1/2)
inline Mat p_of_k(const Mat& K) {
    int c = K.cols();
    Mat G = K.transpose() * K;
    for (int i = 0; i < c; ++i) G(i, i) += 1.0;
    EigSym eg = eig_sym(G);
    Mat D(c, c);
    for (int i = 0; i < c; ++i) D(i, i) = 1.0 / std::sqrt(eg.values[i]);
    return eg.vectors * D * eg.vectors.transpose();
}

// ---- measurement plans (simultaneous linear-combination measurements) ----

struct MeasurePlan {
    Mat network;                // beamsplitter matrix O applied before homodyne
    std::vector<double> thetas; // homodyne phases, p cos(theta) + x sin(theta)
    std::vector<double> phis;   // general case only; thetas[i] = phis[i] + pi/2
    Mat postprocess;            // recovers q from the homodyne outcomes
    bool near_singular = false; // |tan(theta)| beyond feedforward range
};

// Plan measuring q = p + A x for symmetric A: diagonalize A = O^T diag(t) O,
// homodyne at theta_i = arctan(lambda_i), postprocess through O^T diag(1/cos).
inline MeasurePlan measure_symmetric(Mat A) {
    int n = A.rows();
    if (A.cols() != n) throw std::invalid_argument("measure_symmetric: square matrix required");
    double asym = (A - A.transpose()).norm_inf();
    if (asym > 1e-12 * std::max(1.0, A.norm_inf()) && asym > 1e-12)
        throw std::invalid_argument("measure_symmetric: matrix is not symmetric");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double v = 0.5 * (A(i, j) + A(j, i));
            A(i, j) = A(j, i) = v;
        }
    EigSym eg = eig_sym(A);
    MeasurePlan plan;
    plan.network = eg.vectors.transpose();
    plan.thetas.resize(n);
    Mat C(n, n);
    for (int i = 0; i < n; ++i) {
        plan.thetas[i] = std::atan(eg.values[i]);
        if (std::abs(eg.values[i]) > 1e12) plan.near_singular = true;
        C(i, i) = 1.0 / std::cos(plan.thetas[i]);
    }
    plan.postprocess = eg.vectors * C;
    return plan;
}

// Residual of the symmetric-plan contract: postprocessing the homodyne
// symbols of (p + A x) must reproduce p + A x as a linear form.
inline double measure_symmetric_residual(const MeasurePlan& plan, const Mat& A) {
    int n = A.rows();
    Mat C(n, n), S(n, n);
    for (int i = 0; i < n; ++i) {
        C(i, i) = std::cos(plan.thetas[i]);
        S(i, i) = std::sin(plan.thetas[i]);
    }
    // y = C O p + S O x ; q = P y
    Mat p_part = plan.postprocess * C * plan.network - Mat::identity(n);
    Mat x_part = plan.postprocess * S * plan.network - A;
    return std::max(p_part.norm_inf(), x_part.norm_inf());
}

// O^T diag(tan theta) O compared against A.
inline double evd_reconstruct_residual(const MeasurePlan& plan, const Mat& A) {
    int n = A.rows();
    Mat T(n, n);
    for (int i = 0; i < n; ++i) T(i, i) = std::tan(plan.thetas[i]);
    return (plan.network.transpose() * T * plan.network - A).norm_inf();
}

// ---- unitary O'' Phi O decomposition ----

struct UnitaryOfo {
    Mat o2;                  // O''
    std::vector<double> phi; // Phi = diag(e^{i phi})
    Mat o;                   // O
};

inline UnitaryOfo unitary_ofo(const CMat& U) {
    int n = U.rows();
    if (!U.is_unitary(1e-10)) throw std::invalid_argument("unitary_ofo: input not unitary");
    CMat W = U * U.transpose(); // complex symmetric unitary
    Mat X = W.real(), Y = W.imag();
    // simultaneously diagonalize the commuting pair (X, Y)
    for (double group_tol : {1e-8, 1e-6, 1e-4, 1e-2}) {
        EigSym ex = eig_sym(X);
        Mat Q = ex.vectors;
        int start = 0;
        while (start < n) {
            int stop = start + 1;
            while (stop < n && std::abs(ex.values[stop] - ex.values[start]) < group_tol) ++stop;
            int g = stop - start;
            if (g > 1) {
                // diagonalize Y restricted to the degenerate block
                Mat Qg(n, g);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < g; ++j) Qg(i, j) = Q(i, start + j);
                Mat Yg = Qg.transpose() * Y * Qg;
                EigSym ey = eig_sym(Yg);
                Mat Qn = Qg * ey.vectors;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < g; ++j) Q(i, start + j) = Qn(i, j);
            }
            start = stop;
        }
        CMat Qc = CMat::from_real(Q);
        CMat Phi2 = Qc.adjoint() * W * Qc;
        double off = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) off = std::max(off, std::abs(Phi2(i, j)));
        if (off > 1e-9) continue; // widen the degeneracy grouping and retry
        UnitaryOfo out;
        out.o2 = Q;
        out.phi.resize(n);
        CMat PhiInv(n, n);
        for (int i = 0; i < n; ++i) {
            double half = 0.5 * std::arg(Phi2(i, i));
            // half-angle branch fixed to (-pi/2, pi/2]
            if (half <= -M_PI / 2) half += M_PI;
            out.phi[i] = half;
            PhiInv(i, i) = std::exp(cdouble(0, -half));
        }
        CMat Ocomplex = PhiInv * Qc.adjoint() * U;
        Mat O = Ocomplex.real();
        if (Ocomplex.imag().norm_inf() > 1e-8) continue;
        out.o = O;
        return out;
    }
    throw std::runtime_error("unitary_ofo: simultaneous diagonalization failed");
}

inline double ofo_residual(const UnitaryOfo& d, const CMat& U) {
    int n = U.rows();
    CMat Phi(n, n);
    for (int i = 0; i < n; ++i) Phi(i, i) = std::exp(cdouble(0, d.phi[i]));
    return (CMat::from_real(d.o2) * Phi * CMat::from_real(d.o) - U).norm_inf();
}

// ---- general commuting measurement q = B p + C x ----

struct GeneralPlan {
    MeasurePlan plan; // network O, phases phi (and thetas = phi + pi/2)
    Mat b_target, c_target;
};

inline GeneralPlan measure_general(const Mat& B, const Mat& C) {
    int n = B.rows();
    if (B.cols() != n || C.rows() != n || C.cols() != n)
        throw std::invalid_argument("measure_general: square matrices required");
    CMat A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = cdouble(C(i, j), -B(i, j)) / std::sqrt(2.0);
    CMat AAd = A * A.adjoint();
    if ((AAd - AAd.transpose()).norm_inf() > 1e-10 * std::max(1.0, AAd.norm_inf()))
        throw std::invalid_argument("measure_general: operator set does not commute");
    Mat W = AAd.real();
    EigSym eg = eig_sym(W);
    Mat Oprime = eg.vectors;
    std::vector<double> d1(n);
    for (int i = 0; i < n; ++i) d1[i] = std::sqrt(std::max(0.0, eg.values[i]));
    // V = D1^+ O'^T A, completed to a unitary on the null rows
    CMat V(n, n);
    double tol = 1e-10 * std::max(1.0, A.norm_inf());
    std::vector<int> null_rows;
    for (int i = 0; i < n; ++i) {
        if (d1[i] <= tol) {
            null_rows.push_back(i);
            continue;
        }
        for (int j = 0; j < n; ++j) {
            cdouble acc = 0;
            for (int k = 0; k < n; ++k) acc += Oprime(k, i) * A(k, j);
            V(i, j) = acc / d1[i];
        }
    }
    // complete null rows by Gram-Schmidt against the existing rows
    for (std::size_t t = 0, seed = 0; t < null_rows.size(); ++seed) {
        if (int(seed) >= n) throw std::runtime_error("measure_general: row completion failed");
        std::vector<cdouble> v(n, 0.0);
        v[seed] = 1.0;
        for (int rep = 0; rep < 2; ++rep)
            for (int i = 0; i < n; ++i) {
                bool live = std::find(null_rows.begin(), null_rows.begin() + t, i) !=
                                null_rows.begin() + t ||
                            d1[i] > tol;
                if (!live) continue;
                cdouble dot = 0;
                for (int j = 0; j < n; ++j) dot += std::conj(V(i, j)) * v[j];
                for (int j = 0; j < n; ++j) v[j] -= dot * V(i, j);
            }
        double norm = 0;
        for (auto& z : v) norm += std::norm(z);
        norm = std::sqrt(norm);
        if (norm < 1e-8) continue;
        int row = null_rows[t];
        for (int j = 0; j < n; ++j) V(row, j) = v[j] / norm;
        ++t;
    }
    UnitaryOfo ofo = unitary_ofo(V);
    GeneralPlan out;
    out.plan.network = ofo.o;
    out.plan.phis = ofo.phi;
    out.plan.thetas.resize(n);
    for (int i = 0; i < n; ++i) out.plan.thetas[i] = ofo.phi[i] + M_PI / 2;
    Mat D1(n, n);
    for (int i = 0; i < n; ++i) D1(i, i) = d1[i];
    out.plan.postprocess = (Oprime * D1 * ofo.o2).scaled(std::sqrt(2.0));
    out.b_target = B;
    out.c_target = C;
    return out;
}

// Residual of the general-plan contract: with y_i the homodyne outcome at
// theta_i = phi_i + pi/2 after the network O, P y must equal B p + C x.
inline double measure_general_residual(const GeneralPlan& g) {
    int n = g.b_target.rows();
    Mat Cs(n, n), Ss(n, n);
    for (int i = 0; i < n; ++i) {
        Cs(i, i) = std::cos(g.plan.phis[i]);
        Ss(i, i) = std::sin(g.plan.phis[i]);
    }
    // y = cos(phi) x' - sin(phi) p'  with x' = O x, p' = O p
    Mat x_part = g.plan.postprocess * Cs * g.plan.network - g.c_target;
    Mat p_part = g.plan.postprocess * Ss * g.plan.network.scaled(-1.0) - g.b_target;
    return std::max(x_part.norm_inf(), p_part.norm_inf());
}

// ---- Givens factorization of an orthogonal network ----

struct TwoModeRotation {
    int i, j;      // modes, i < j (j == i means a single-mode sign flip)
    double c, s;   // block [[c, -s], [s, c]], or [[c, s], [s, -c]] reflected
    bool reflect = false;

    Mat matrix(int n) const {
        Mat m = Mat::identity(n);
        if (i == j) {
            m(i, i) = -1.0;
            return m;
        }
        m(i, i) = c;
        m(j, j) = reflect ? -c : c;
        m(i, j) = reflect ? s : -s;
        m(j, i) = s;
        return m;
    }
};

// Factor an orthogonal O into at most n(n-1)/2 two-mode elements with
// product(elements, in order) == O.
inline std::vector<TwoModeRotation> givens_factor(const Mat& O) {
    int n = O.rows();
    if (!O.is_orthogonal(1e-10)) throw std::invalid_argument("givens_factor: input not orthogonal");
    Mat A = O;
    // Eliminate below-diagonal entries: G_k ... G_1 O = diag(+-1), so
    // O = G_1^T ... G_k^T diag.  Each pushed element is exactly G_t^T.
    std::vector<TwoModeRotation> out;
    for (int j = 0; j < n - 1; ++j)
        for (int i = j + 1; i < n; ++i) {
            double a = A(j, j), b = A(i, j);
            if (std::abs(b) < 1e-14) continue;
            double r = std::hypot(a, b);
            double c = a / r, s = b / r;
            for (int k = 0; k < n; ++k) {
                double ajk = A(j, k), aik = A(i, k);
                A(j, k) = c * ajk + s * aik;
                A(i, k) = -s * ajk + c * aik;
            }
            out.push_back({j, i, c, s, false});
        }
    std::vector<int> flips;
    for (int i = 0; i < n; ++i)
        if (A(i, i) < 0) flips.push_back(i);
    std::size_t t = 0;
    for (; t + 1 < flips.size(); t += 2)
        out.push_back({flips[t], flips[t + 1], -1.0, 0.0, false}); // rotation by pi
    if (t < flips.size()) {
        int i0 = flips[t];
        // fold the leftover sign flip into the last element touching i0; any
        // later element commutes with the flip, so this is exact
        bool folded = false;
        for (auto it = out.rbegin(); it != out.rend(); ++it) {
            if (it->i != i0 && it->j != i0) continue; // commutes with the flip
            if (it->reflect) break;
            if (it->j == i0) {
                it->reflect = true;
            } else {
                it->c = -it->c;
                it->s = -it->s;
                it->reflect = true;
            }
            folded = true;
            break;
        }
        if (!folded) out.push_back({i0, i0, 1.0, 0.0, false}); // single-mode flip
    }
    return out;
}

inline Mat givens_reconstruct(const std::vector<TwoModeRotation>& rots, int n) {
    Mat m = Mat::identity(n);
    for (auto& g : rots) m = m * g.matrix(n);
    return m;
}

// ---- deterministic random test matrices ----

inline Mat random_orthogonal(Rng& rng, int n) {
    Mat A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = rng.centered();
    // Gram-Schmidt columns
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < j; ++k) {
            double dot = 0;
            for (int i = 0; i < n; ++i) dot += A(i, j) * A(i, k);
            for (int i = 0; i < n; ++i) A(i, j) -= dot * A(i, k);
        }
        double norm = 0;
        for (int i = 0; i < n; ++i) norm += A(i, j) * A(i, j);
        norm = std::sqrt(norm);
        if (norm < 1e-8) return random_orthogonal(rng, n);
        for (int i = 0; i < n; ++i) A(i, j) /= norm;
    }
    return A;
}

inline CMat random_unitary(Rng& rng, int n) {
    CMat A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = cdouble(rng.centered(), rng.centered());
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < j; ++k) {
            cdouble dot = 0;
            for (int i = 0; i < n; ++i) dot += std::conj(A(i, k)) * A(i, j);
            for (int i = 0; i < n; ++i) A(i, j) -= dot * A(i, k);
        }
        double norm = 0;
        for (int i = 0; i < n; ++i) norm += std::norm(A(i, j));
        norm = std::sqrt(norm);
        if (norm < 1e-8) return random_unitary(rng, n);
        for (int i = 0; i < n; ++i) A(i, j) /= norm;
    }
    return A;
}

inline Mat random_symmetric(Rng& rng, int n, double scale = 2.0) {
    Mat A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) A(i, j) = A(j, i) = rng.centered(scale);
    return A;
}

} // namespace cvqc::linalg
