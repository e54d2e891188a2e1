/// @file stability.cpp
/// @brief Galerkin eigen-solves and membership certificates for L_g = -Δ_g + K_g.

#include "core/stability.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace horizon {

namespace {

constexpr double kFourPi = 4.0 * M_PI;

/// Ring means of a nodal fine-grid field (valid summary only when zonal).
std::vector<double> ring_means(const SphereGrid& g, const std::vector<double>& v) {
    std::vector<double> out(g.nlat, 0.0);
    for (int i = 0; i < g.nlat; ++i) {
        double s = 0.0;
        const double* r = v.data() + static_cast<size_t>(i) * g.nlon;
        for (int j = 0; j < g.nlon; ++j) s += r[j];
        out[i] = s / g.nlon;
    }
    return out;
}

/// Grouped basis ordering: m = 0 cos block, then for m = 1..L the cos block
/// and the sin block, each running over l = m..L.  perm maps grouped index to
/// the packed coefficient index l(l+1)+m.
struct GroupedBasis {
    int L;
    std::vector<int> perm;        // grouped index -> coefficient index
    std::vector<int> block_start; // per (m,type) block
    std::vector<int> block_m;
    std::vector<int> block_sin;   // 0 = cos, 1 = sin

    explicit GroupedBasis(int bandlimit) : L(bandlimit) {
        for (int m = 0; m <= L; ++m)
            for (int type = 0; type < (m == 0 ? 1 : 2); ++type) {
                block_start.push_back(static_cast<int>(perm.size()));
                block_m.push_back(m);
                block_sin.push_back(type);
                for (int l = m; l <= L; ++l) perm.push_back(l * (l + 1) + (type ? -m : m));
            }
    }
    int blocks() const { return static_cast<int>(block_start.size()); }
    int block_size(int b) const { return L + 1 - block_m[b]; }
};

/// Dense Gram matrix G_IJ = ∫ ρ Y_I Y_J dA* in grouped ordering, assembled
/// ring by ring with the longitude integral reduced to ring Fourier modes.
Eigen::MatrixXd gram_matrix(const SphereGrid& fg, const std::vector<double>& rho,
                            const GroupedBasis& gb) {
    const int L = gb.L;
    const int N = static_cast<int>(gb.perm.size());
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(N, N);

    const double dphi = 2.0 * M_PI / fg.nlon;
    std::vector<double> C(2 * L + 1), S(2 * L + 1);
    LegendreWorkspace ws;
    std::vector<double> Pb(static_cast<size_t>(L + 1) * (L + 1));  // per-(m): rows l=m..L

    const double n0 = 1.0 / std::sqrt(2.0 * M_PI), n1 = 1.0 / std::sqrt(M_PI);

    for (int i = 0; i < fg.nlat; ++i) {
        // Ring Fourier coefficients of ρ, with the longitude weight folded in.
        for (int mu = 0; mu <= 2 * L; ++mu) {
            double c = 0.0, s = 0.0;
            const double* r = rho.data() + static_cast<size_t>(i) * fg.nlon;
            const double* cm = fg.cos_mphi.data();
            const double* sm = fg.sin_mphi.data();
            if (mu <= fg.L) {
                cm += static_cast<size_t>(mu) * fg.nlon;
                sm += static_cast<size_t>(mu) * fg.nlon;
                for (int j = 0; j < fg.nlon; ++j) {
                    c += r[j] * cm[j];
                    s += r[j] * sm[j];
                }
            } else {
                for (int j = 0; j < fg.nlon; ++j) {
                    c += r[j] * std::cos(mu * fg.phi[j]);
                    s += r[j] * std::sin(mu * fg.phi[j]);
                }
            }
            C[mu] = c * dphi;
            S[mu] = s * dphi;
        }
        auto Sgn = [&](int mu) { return mu >= 0 ? S[mu] : -S[-mu]; };

        legendre_columns(L, fg.x[i], fg.sin_theta[i], ws);
        for (int m = 0; m <= L; ++m) {
            double nm = (m == 0) ? n0 : n1;
            const double* col = ws.P.data() + ws.off(m);
            for (int l = m; l <= L; ++l) Pb[static_cast<size_t>(m) * (L + 1) + (l - m)] = nm * col[l - m];
        }

        double wq = fg.glw[i];
        for (int bI = 0; bI < gb.blocks(); ++bI) {
            int mI = gb.block_m[bI], tI = gb.block_sin[bI], nI = gb.block_size(bI);
            for (int bJ = bI; bJ < gb.blocks(); ++bJ) {
                int mJ = gb.block_m[bJ], tJ = gb.block_sin[bJ], nJ = gb.block_size(bJ);
                double T;
                if (mI == 0 && mJ == 0) T = C[0];
                else if (mI == 0) T = tJ ? S[mJ] : C[mJ];
                else if (tI == 0 && tJ == 0) T = 0.5 * (C[mJ - mI] + C[mI + mJ]);
                else if (tI == 1 && tJ == 1) T = 0.5 * (C[mJ - mI] - C[mI + mJ]);
                else if (tI == 0 && tJ == 1) T = 0.5 * (S[mI + mJ] + Sgn(mJ - mI));
                else T = 0.5 * (S[mI + mJ] + Sgn(mI - mJ));  // tI = sin, tJ = cos
                if (T == 0.0) continue;
                Eigen::Map<const Eigen::VectorXd> pI(Pb.data() + static_cast<size_t>(mI) * (L + 1), nI);
                Eigen::Map<const Eigen::VectorXd> pJ(Pb.data() + static_cast<size_t>(mJ) * (L + 1), nJ);
                G.block(gb.block_start[bI], gb.block_start[bJ], nI, nJ) += (wq * T) * (pI * pJ.transpose());
            }
        }
    }
    // Mirror the upper block triangle.
    for (int bI = 0; bI < gb.blocks(); ++bI)
        for (int bJ = bI + 1; bJ < gb.blocks(); ++bJ) {
            int r = gb.block_start[bI], c = gb.block_start[bJ];
            int nI = gb.block_size(bI), nJ = gb.block_size(bJ);
            G.block(c, r, nJ, nI) = G.block(r, c, nI, nJ).transpose();
        }
    return G;
}

struct SolveResult {
    double lambda = 0.0, lambda2 = 0.0;
    Coeffs u{0};
};

/// Dense generalized solve in grouped ordering.
SolveResult solve_dense(const ConformalMetric& g) {
    const int L = g.bandlimit();
    GroupedBasis gb(L);
    const SphereGrid& fg = *g.fine();

    std::vector<double> rhoA(fg.nodes());
    for (size_t k = 0; k < rhoA.size(); ++k) rhoA[k] = 1.0 - g.lap_w_fine()[k];
    Eigen::MatrixXd A = gram_matrix(fg, rhoA, gb);
    for (size_t idx = 0; idx < gb.perm.size(); ++idx) {
        int k = gb.perm[idx];
        int l = static_cast<int>(std::floor(std::sqrt(static_cast<double>(k))));
        A(static_cast<int>(idx), static_cast<int>(idx)) += static_cast<double>(l) * (l + 1);
    }
    Eigen::MatrixXd B = gram_matrix(fg, g.conformal_density_fine(), gb);

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B);
    if (es.info() != Eigen::Success) throw numeric_error("first_eigenpair: dense generalized eigensolver failed");

    SolveResult out;
    out.lambda = es.eigenvalues()(0);
    out.lambda2 = es.eigenvalues()(1);
    out.u = Coeffs(L);
    Eigen::VectorXd v = es.eigenvectors().col(0);
    for (size_t idx = 0; idx < gb.perm.size(); ++idx) out.u.c[gb.perm[idx]] = v(static_cast<int>(idx));
    return out;
}

/// Zonal fast path: the Gram matrices block-diagonalize over (m, cos/sin);
/// solve every block and take the global minimum (sin blocks duplicate cos).
SolveResult solve_zonal(const ConformalMetric& g) {
    const int L = g.bandlimit();
    const SphereGrid& fg = *g.fine();

    std::vector<double> rhoA(fg.nodes());
    for (size_t k = 0; k < rhoA.size(); ++k) rhoA[k] = 1.0 - g.lap_w_fine()[k];
    std::vector<double> rA = ring_means(fg, rhoA);
    std::vector<double> rB = ring_means(fg, g.conformal_density_fine());

    // Per-ring Legendre tables: rows = rings, per m the column l = m..L.
    LegendreWorkspace ws;
    std::vector<Eigen::MatrixXd> P(L + 1);
    for (int m = 0; m <= L; ++m) P[m].resize(fg.nlat, L + 1 - m);
    for (int i = 0; i < fg.nlat; ++i) {
        legendre_columns(L, fg.x[i], fg.sin_theta[i], ws);
        for (int m = 0; m <= L; ++m) {
            const double* col = ws.P.data() + ws.off(m);
            for (int l = m; l <= L; ++l) P[m](i, l - m) = col[l - m];
        }
    }
    Eigen::VectorXd wA(fg.nlat), wB(fg.nlat);
    for (int i = 0; i < fg.nlat; ++i) {
        wA(i) = fg.glw[i] * rA[i];
        wB(i) = fg.glw[i] * rB[i];
    }

    double best = std::numeric_limits<double>::infinity(), second = best;
    int best_m = 0;
    Eigen::VectorXd best_vec;
    for (int m = 0; m <= L; ++m) {
        int n = L + 1 - m;
        Eigen::MatrixXd Am = P[m].transpose() * wA.asDiagonal() * P[m];
        for (int l = m; l <= L; ++l) Am(l - m, l - m) += static_cast<double>(l) * (l + 1);
        Eigen::MatrixXd Bm = P[m].transpose() * wB.asDiagonal() * P[m];
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Am, Bm);
        if (es.info() != Eigen::Success) throw numeric_error("first_eigenpair: zonal block eigensolver failed");
        for (int idx = 0; idx < n; ++idx) {
            double lam = es.eigenvalues()(idx);
            // m > 0 eigenvalues occur for both cos and sin harmonics.
            int mult = (m == 0) ? 1 : 2;
            for (int rep = 0; rep < mult; ++rep) {
                if (lam < best) {
                    second = best;
                    best = lam;
                    best_m = m;
                    if (rep == 0) best_vec = es.eigenvectors().col(idx);
                } else if (lam < second) {
                    second = lam;
                }
            }
        }
    }
    SolveResult out;
    out.lambda = best;
    out.lambda2 = second;
    out.u = Coeffs(L);
    for (int l = best_m; l <= L; ++l) out.u.at(l, best_m) = best_vec(l - best_m);
    return out;
}

} // namespace

double quadratic_form(const ConformalMetric& g, const ScalarField& f) {
    if (f.grid != g.base()) throw input_error("quadratic_form: field not on the metric's base grid");
    double fmax = 0.0;
    for (double v : f.values) fmax = std::max(fmax, std::abs(v));
    if (fmax == 0.0) throw input_error("quadratic_form: zero field");

    const SphereGrid& fg = *g.fine();
    Coeffs a = sh_analyze(f);
    std::vector<double> ff = sht_synthesize(fg, a);
    std::vector<double> gt, gp;
    synth_gradient(fg, a, gt, gp);

    double s = 0.0;
    for (int i = 0; i < fg.nlat; ++i) {
        double row = 0.0;
        for (int j = 0; j < fg.nlon; ++j) {
            size_t k = static_cast<size_t>(i) * fg.nlon + j;
            row += gt[k] * gt[k] + gp[k] * gp[k] + (1.0 - g.lap_w_fine()[k]) * ff[k] * ff[k];
        }
        s += fg.weight(i) * row;
    }
    return s;
}

EigenPair first_eigenpair(const ConformalMetric& g) {
    SolveResult sr = is_zonal(g.w_coeffs()) ? solve_zonal(g) : solve_dense(g);

    EigenPair ep;
    ep.lambda = sr.lambda;
    ep.gap = sr.lambda2 - sr.lambda;
    ep.u_coeffs = sr.u;

    // Sign fix: mean over dA_g positive.
    const SphereGrid& fg = *g.fine();
    std::vector<double> uf = sht_synthesize(fg, ep.u_coeffs);
    double mean = g.integrate_fine(uf);
    if (mean < 0.0) {
        for (double& c : ep.u_coeffs.c) c = -c;
        for (double& v : uf) v = -v;
    }
    ep.u = sh_synthesize(g.base(), ep.u_coeffs);

    ep.min_u = uf[0];
    for (double v : uf) ep.min_u = std::min(ep.min_u, v);

    // Strong residual ||e^{-2w}(-Δ*u + (1-Δ*w)u) - λu||_∞ on the fine grid.
    std::vector<double> lap_u = sht_synthesize(fg, laplacian_coeffs(ep.u_coeffs));
    double res = 0.0;
    for (size_t k = 0; k < uf.size(); ++k) {
        double Lu = (-lap_u[k] + (1.0 - g.lap_w_fine()[k]) * uf[k]) / g.conformal_density_fine()[k];
        res = std::max(res, std::abs(Lu - ep.lambda * uf[k]));
    }
    ep.residual = res;
    return ep;
}

double default_membership_tol(const ConformalMetric& g) { return 1e-8 * (kFourPi / g.area()); }

bool is_in_M_plus(const ConformalMetric& g, double tol) {
    if (!(tol > 0.0)) throw input_error("is_in_M_plus: tol must be positive");
    return first_eigenpair(g).lambda > tol;
}

bool is_in_M_plus(const ConformalMetric& g) { return is_in_M_plus(g, default_membership_tol(g)); }

ScalarField q_operator(const ScalarField& w, const ScalarField& phi) {
    if (w.grid != phi.grid) throw input_error("q_operator: fields on different grids");
    const GridPtr& g = w.grid;
    Coeffs aw = sh_analyze(w), ap = sh_analyze(phi);
    std::vector<double> lap_phi = sht_synthesize(*g, laplacian_coeffs(ap));
    Coeffs diff(ap.L);
    for (size_t k = 0; k < diff.c.size(); ++k) diff.c[k] = ap.c[k] - aw.c[k];
    std::vector<double> gt, gp;
    synth_gradient(*g, diff, gt, gp);
    ScalarField out(g);
    for (size_t k = 0; k < out.size(); ++k)
        out.values[k] = -lap_phi[k] - (gt[k] * gt[k] + gp[k] * gp[k]) + 1.0;
    return out;
}

std::vector<double> q_operator_fine(const ConformalMetric& g, const std::vector<double>& phi_fine) {
    const SphereGrid& fg = *g.fine();
    Coeffs ap = sht_analyze(fg, phi_fine, fg.L);
    std::vector<double> lap_phi = sht_synthesize(fg, laplacian_coeffs(ap));
    Coeffs diff = g.w_coeffs().resized(fg.L);
    for (size_t k = 0; k < diff.c.size(); ++k) diff.c[k] = ap.c[k] - diff.c[k];
    std::vector<double> gt, gp;
    synth_gradient(fg, diff, gt, gp);
    std::vector<double> out(phi_fine.size());
    for (size_t k = 0; k < out.size(); ++k)
        out[k] = -lap_phi[k] - (gt[k] * gt[k] + gp[k] * gp[k]) + 1.0;
    return out;
}

MembershipCertificate certificate_from_eigenpair(const ConformalMetric& g) {
    EigenPair ep = first_eigenpair(g);
    double tol = default_membership_tol(g);
    if (!(ep.lambda > tol)) throw verify_error("certificate_from_eigenpair: first eigenvalue is not positive");
    const SphereGrid& fg = *g.fine();
    std::vector<double> uf = sht_synthesize(fg, ep.u_coeffs);
    double umin = uf[0];
    for (double v : uf) umin = std::min(umin, v);
    if (!(umin > 0.0)) throw verify_error("certificate_from_eigenpair: eigenfunction is not positive");

    std::vector<double> phi(uf.size());
    for (size_t k = 0; k < phi.size(); ++k) phi[k] = std::log(uf[k]) + g.w_fine()[k];
    std::vector<double> Q = q_operator_fine(g, phi);
    double min_Q = Q[0];
    for (double v : Q) min_Q = std::min(min_Q, v);

    MembershipCertificate cert;
    cert.kind = CertificateKind::q_certificate;
    cert.lambda = ep.lambda;
    cert.phi = ScalarField(g.fine(), std::move(phi));
    cert.min_Q = min_Q;
    if (!(cert.min_Q > 0.0)) throw verify_error("certificate_from_eigenpair: Q_w(log u + w) is not positive");
    return cert;
}

std::optional<MembershipCertificate> gradient_bound_test(const ConformalMetric& g) {
    const SphereGrid& fg = *g.fine();
    std::vector<double> gt, gp;
    synth_gradient(fg, g.w_coeffs(), gt, gp);
    double sup = 0.0;
    for (size_t k = 0; k < gt.size(); ++k)
        sup = std::max(sup, std::sqrt(gt[k] * gt[k] + gp[k] * gp[k]));
    if (sup >= 1.0) return std::nullopt;
    MembershipCertificate cert;
    cert.kind = CertificateKind::gradient_bound;
    cert.sup_grad_w = sup;
    return cert;
}

} // namespace horizon
