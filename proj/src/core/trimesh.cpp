#include "core/trimesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <unordered_map>
#include <utility>

#include "core/errors.hpp"

namespace horizon {

namespace {

constexpr double kPi = 3.14159265358979323846;

uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<uint64_t>(a) << 32) | static_cast<uint64_t>(b);
}

/// Stable triangle kernel (Kahan): sorts the sides, forms the four
/// cancellation-free factors, and returns the area together with the three
/// interior angles via tan(theta/2) — accurate for needle triangles where
/// the plain law of cosines loses the defect signal.
struct TriangleKernel {
    double area;
    double angle[3];  // angle[i] is opposite side i
};

TriangleKernel triangle_kernel(double s0, double s1, double s2) {
    int idx[3] = {0, 1, 2};
    double s[3] = {s0, s1, s2};
    // insertion sort descending, tracking original side indices
    for (int i = 1; i < 3; ++i)
        for (int j = i; j > 0 && s[j] > s[j - 1]; --j) {
            std::swap(s[j], s[j - 1]);
            std::swap(idx[j], idx[j - 1]);
        }
    const double x = s[0], y = s[1], z = s[2];
    const double f_sum = x + (y + z);
    const double fx = z - (x - y);  // (-x + y + z)
    const double fy = z + (x - y);  // (-y + x + z)
    const double fz = x + (y - z);  // (-z + x + y)
    if (!(fx > 0.0) || !(z > 0.0))
        throw numeric_error("degenerate triangle in intrinsic mesh");
    TriangleKernel k;
    k.area = 0.25 * std::sqrt(f_sum * fx * fy * fz);
    k.angle[idx[0]] = 2.0 * std::atan(std::sqrt((fy * fz) / (f_sum * fx)));
    k.angle[idx[1]] = 2.0 * std::atan(std::sqrt((fx * fz) / (f_sum * fy)));
    k.angle[idx[2]] = 2.0 * std::atan(std::sqrt((fx * fy) / (f_sum * fz)));
    return k;
}

}  // namespace

// ---------------------------------------------------------------------------
// construction

int TriMesh::add_vertex() { return n_vertices_++; }

void TriMesh::add_face(int a, int b, int c) {
    if (a == b || b == c || a == c || a < 0 || b < 0 || c < 0)
        throw input_error("mesh face must have three distinct vertices");
    faces_.push_back({a, b, c});
}

void TriMesh::set_edge_length(int a, int b, double length) {
    if (a == b) throw input_error("mesh edge endpoints must differ");
    if (!(length > 0.0)) throw input_error("mesh edge length must be positive");
    auto [it, inserted] = edge_lengths_.emplace(edge_key(a, b), length);
    if (!inserted && std::abs(it->second - length) > 1e-9 * it->second)
        throw numeric_error("conflicting lengths assigned to one mesh edge");
}

bool TriMesh::has_edge(int a, int b) const {
    return edge_lengths_.count(edge_key(a, b)) > 0;
}

double TriMesh::raw_length(uint64_t key) const {
    auto it = edge_lengths_.find(key);
    if (it == edge_lengths_.end())
        throw input_error("mesh face references an edge with no length");
    return it->second;
}

double TriMesh::edge_length(int a, int b) const {
    return raw_length(edge_key(a, b));
}

void TriMesh::finalize() {
    if (finalized_) throw input_error("mesh already finalized");
    const int nf = face_count();
    if (nf == 0 || n_vertices_ == 0)
        throw input_error("mesh must have vertices and faces");

    // orientability + closedness: every directed edge must appear exactly
    // once, and its reversal exactly once in another face
    std::unordered_map<uint64_t, std::pair<int, int>> directed;  // (face, corner)
    directed.reserve(static_cast<size_t>(nf) * 3);
    for (int f = 0; f < nf; ++f)
        for (int c = 0; c < 3; ++c) {
            const int u = faces_[f][(c + 1) % 3], v = faces_[f][(c + 2) % 3];
            const uint64_t key =
                (static_cast<uint64_t>(u) << 32) | static_cast<uint64_t>(v);
            if (!directed.emplace(key, std::make_pair(f, c)).second)
                throw input_error("mesh is not orientable: repeated directed edge");
        }
    face_nbrs_.assign(nf, {-1, -1, -1});
    for (int f = 0; f < nf; ++f)
        for (int c = 0; c < 3; ++c) {
            const int u = faces_[f][(c + 1) % 3], v = faces_[f][(c + 2) % 3];
            const uint64_t rev =
                (static_cast<uint64_t>(v) << 32) | static_cast<uint64_t>(u);
            auto it = directed.find(rev);
            if (it == directed.end())
                throw input_error("mesh is not closed: boundary edge found");
            face_nbrs_[f][c] = it->second.first;
        }

    angles_.resize(nf);
    areas_.resize(nf);
    defects_.assign(n_vertices_, 2.0 * kPi);
    adjacency_.assign(n_vertices_, {});
    max_edge_length_ = 0.0;
    min_edge_length_ = 0.0;
    for (int f = 0; f < nf; ++f) {
        const auto& [a, b, c] = faces_[f];
        // side i is opposite corner i
        const double s0 = edge_length(b, c);
        const double s1 = edge_length(c, a);
        const double s2 = edge_length(a, b);
        const TriangleKernel k = triangle_kernel(s0, s1, s2);
        areas_[f] = k.area;
        angles_[f] = {k.angle[0], k.angle[1], k.angle[2]};
        defects_[a] -= k.angle[0];
        defects_[b] -= k.angle[1];
        defects_[c] -= k.angle[2];
    }
    size_t used = 0;
    for (const auto& [key, len] : edge_lengths_) {
        (void)key;
        max_edge_length_ = std::max(max_edge_length_, len);
        min_edge_length_ = (used++ == 0) ? len : std::min(min_edge_length_, len);
    }
    for (const auto& [key, len] : edge_lengths_) {
        const int a = static_cast<int>(key >> 32);
        const int b = static_cast<int>(key & 0xffffffffu);
        adjacency_[a].emplace_back(b, len);
        adjacency_[b].emplace_back(a, len);
    }
    for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
    build_fans();
    finalized_ = true;
}

void TriMesh::build_fans() {
    std::vector<std::vector<std::pair<int, int>>> incident(n_vertices_);
    for (int f = 0; f < face_count(); ++f)
        for (int c = 0; c < 3; ++c) incident[faces_[f][c]].emplace_back(f, c);
    fans_.assign(n_vertices_, {});
    for (int v = 0; v < n_vertices_; ++v) {
        const auto& inc = incident[v];
        if (inc.empty()) throw input_error("isolated vertex in mesh");
        std::vector<int> fan;
        fan.reserve(inc.size());
        int f = inc.front().first, c = inc.front().second;
        for (size_t step = 0; step < inc.size(); ++step) {
            fan.push_back(f);
            // cross the edge {v, next corner of f}: it is opposite corner c+2
            const int g = face_nbrs_[f][(c + 2) % 3];
            int gc = -1;
            for (int k = 0; k < 3; ++k)
                if (faces_[g][k] == v) gc = k;
            if (gc < 0) throw numeric_error("inconsistent face adjacency at vertex");
            f = g;
            c = gc;
        }
        if (f != inc.front().first)
            throw input_error("vertex star is not a single closed fan");
        fans_[v] = std::move(fan);
    }
}

int TriMesh::euler_characteristic() const {
    return n_vertices_ - edge_count() + face_count();
}

int TriMesh::opposite_face(int f, int a, int b) const {
    for (int c = 0; c < 3; ++c) {
        const int u = faces_[f][(c + 1) % 3], v = faces_[f][(c + 2) % 3];
        if ((u == a && v == b) || (u == b && v == a)) return face_nbrs_[f][c];
    }
    return -1;
}

double TriMesh::total_area() const {
    double sum = 0.0;
    for (double a : areas_) sum += a;
    return sum;
}

double TriMesh::total_angle_defect() const {
    double sum = 0.0;
    for (double d : defects_) sum += d;
    return sum;
}

double TriMesh::min_angle_defect() const {
    double m = defects_.empty() ? 0.0 : defects_[0];
    for (double d : defects_) m = std::min(m, d);
    return m;
}

void TriMesh::scale_lengths(double s) {
    if (!(s > 0.0)) throw input_error("mesh scale factor must be positive");
    for (auto& [key, len] : edge_lengths_) {
        (void)key;
        len *= s;
    }
    for (double& a : areas_) a *= s * s;
    for (auto& nbrs : adjacency_)
        for (auto& [v, len] : nbrs) {
            (void)v;
            len *= s;
        }
    max_edge_length_ *= s;
    min_edge_length_ *= s;
}

// ---------------------------------------------------------------------------
// spectrum

namespace {

/// Compressed sparse row symmetric matrix with a fixed sparsity pattern.
struct Csr {
    std::vector<int> ptr, col;
    std::vector<double> val;
    int n = 0;

    void matvec(const std::vector<double>& x, std::vector<double>& y) const {
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int k = ptr[i]; k < ptr[i + 1]; ++k) s += val[k] * x[col[k]];
            y[i] = s;
        }
    }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

double TriMesh::fem_lambda1() const {
    if (!finalized_) throw input_error("mesh must be finalized before analysis");
    const int n = n_vertices_;

    // sparsity: self + sorted neighbors
    Csr L;
    L.n = n;
    L.ptr.assign(n + 1, 0);
    for (int v = 0; v < n; ++v)
        L.ptr[v + 1] = L.ptr[v] + 1 + static_cast<int>(adjacency_[v].size());
    L.col.resize(L.ptr[n]);
    L.val.assign(L.ptr[n], 0.0);
    std::vector<int> self_slot(n);
    for (int v = 0; v < n; ++v) {
        int k = L.ptr[v];
        bool placed = false;
        for (const auto& [u, len] : adjacency_[v]) {
            (void)len;
            if (!placed && u > v) {
                self_slot[v] = k;
                L.col[k++] = v;
                placed = true;
            }
            L.col[k++] = u;
        }
        if (!placed) {
            self_slot[v] = k;
            L.col[k++] = v;
        }
    }
    auto slot = [&](int row, int colv) {
        int lo = L.ptr[row], hi = L.ptr[row + 1];
        while (lo < hi) {
            int mid = (lo + hi) / 2;
            if (L.col[mid] < colv)
                lo = mid + 1;
            else
                hi = mid;
        }
        return lo;
    };

    // cotangent stiffness and lumped mass; assembly order is fixed by the
    // face list, so results are bitwise deterministic
    std::vector<double> mass(n, 0.0);
    for (int f = 0; f < face_count(); ++f) {
        const auto& vf = faces_[f];
        const double third = areas_[f] / 3.0;
        for (int c = 0; c < 3; ++c) {
            mass[vf[c]] += third;
            const double w = 0.5 / std::tan(angles_[f][c]);
            const int i = vf[(c + 1) % 3], j = vf[(c + 2) % 3];
            L.val[slot(i, j)] -= w;
            L.val[slot(j, i)] -= w;
            L.val[self_slot[i]] += w;
            L.val[self_slot[j]] += w;
        }
    }

    // shifted operator A = L + M (strictly positive definite)
    Csr A = L;
    for (int v = 0; v < n; ++v) A.val[self_slot[v]] += mass[v];
    std::vector<double> inv_diag(n);
    for (int v = 0; v < n; ++v) inv_diag[v] = 1.0 / A.val[self_slot[v]];

    const double mass_total = [&] {
        double s = 0.0;
        for (double m : mass) s += m;
        return s;
    }();
    auto project_constants = [&](std::vector<double>& x) {
        double c = 0.0;
        for (int v = 0; v < n; ++v) c += mass[v] * x[v];
        c /= mass_total;
        for (int v = 0; v < n; ++v) x[v] -= c;
    };

    std::vector<double> x(n), b(n), y(n), r(n), z(n), p(n), Ap(n);
    for (int v = 0; v < n; ++v) x[v] = std::sin(0.7 * v + 0.3);
    project_constants(x);
    {
        double nrm = 0.0;
        for (int v = 0; v < n; ++v) nrm += mass[v] * x[v] * x[v];
        nrm = std::sqrt(nrm);
        for (double& xv : x) xv /= nrm;
    }

    auto pcg_solve = [&](const std::vector<double>& rhs, std::vector<double>& sol,
                         double rel_tol) {
        // warm start from the previous eigenvector estimate
        A.matvec(sol, Ap);
        for (int v = 0; v < n; ++v) r[v] = rhs[v] - Ap[v];
        const double rhs_nrm = std::sqrt(dot(rhs, rhs));
        double rz = 0.0;
        for (int v = 0; v < n; ++v) {
            z[v] = inv_diag[v] * r[v];
            rz += r[v] * z[v];
        }
        p = z;
        const int max_iter = 200000;
        for (int it = 0; it < max_iter; ++it) {
            if (std::sqrt(dot(r, r)) <= rel_tol * rhs_nrm) return;
            A.matvec(p, Ap);
            const double alpha = rz / dot(p, Ap);
            for (int v = 0; v < n; ++v) {
                sol[v] += alpha * p[v];
                r[v] -= alpha * Ap[v];
            }
            double rz_next = 0.0;
            for (int v = 0; v < n; ++v) {
                z[v] = inv_diag[v] * r[v];
                rz_next += r[v] * z[v];
            }
            const double beta = rz_next / rz;
            rz = rz_next;
            for (int v = 0; v < n; ++v) p[v] = z[v] + beta * p[v];
        }
        throw numeric_error("conjugate gradient stalled in eigenvalue solve");
    };

    double lambda = 0.0, lambda_prev = -1.0;
    int settled = 0;
    y = x;
    for (int outer = 0; outer < 60; ++outer) {
        for (int v = 0; v < n; ++v) b[v] = mass[v] * x[v];
        const double tol = std::max(1e-11, 1e-4 * std::pow(0.1, outer));
        pcg_solve(b, y, tol);
        project_constants(y);
        L.matvec(y, Ap);
        const double num = dot(y, Ap);
        double den = 0.0;
        for (int v = 0; v < n; ++v) den += mass[v] * y[v] * y[v];
        lambda = num / den;
        const double nrm = std::sqrt(den);
        for (int v = 0; v < n; ++v) x[v] = y[v] / nrm;
        y = x;
        if (std::abs(lambda - lambda_prev) <= 1e-10 * std::max(1.0, lambda)) {
            if (++settled >= 2) break;
        } else {
            settled = 0;
        }
        lambda_prev = lambda;
    }
    return lambda;
}

// ---------------------------------------------------------------------------
// reference meshes

TriMesh icosphere(int subdivisions) {
    if (subdivisions < 0 || subdivisions > 7)
        throw input_error("icosphere subdivision count out of range");
    using V3 = std::array<double, 3>;
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<V3> pos = {{-1, phi, 0}, {1, phi, 0},   {-1, -phi, 0}, {1, -phi, 0},
                           {0, -1, phi}, {0, 1, phi},   {0, -1, -phi}, {0, 1, -phi},
                           {phi, 0, -1}, {phi, 0, 1},   {-phi, 0, -1}, {-phi, 0, 1}};
    auto normalize = [](V3 p) {
        const double n = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        return V3{p[0] / n, p[1] / n, p[2] / n};
    };
    for (auto& p : pos) p = normalize(p);
    std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1},   {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4},  {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},   {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11},  {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            pos.push_back(normalize({(pos[a][0] + pos[b][0]) / 2,
                                     (pos[a][1] + pos[b][1]) / 2,
                                     (pos[a][2] + pos[b][2]) / 2}));
            const int id = static_cast<int>(pos.size()) - 1;
            midpoint.emplace(key, id);
            return id;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& [a, b, c] : faces) {
            const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
            next.push_back({a, ab, ca});
            next.push_back({b, bc, ab});
            next.push_back({c, ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }
    TriMesh mesh;
    for (size_t i = 0; i < pos.size(); ++i) mesh.add_vertex();
    auto chord = [&](int a, int b) {
        const double dx = pos[a][0] - pos[b][0];
        const double dy = pos[a][1] - pos[b][1];
        const double dz = pos[a][2] - pos[b][2];
        return std::sqrt(dx * dx + dy * dy + dz * dz);
    };
    for (const auto& [a, b, c] : faces) {
        mesh.add_face(a, b, c);
        mesh.set_edge_length(a, b, chord(a, b));
        mesh.set_edge_length(b, c, chord(b, c));
        mesh.set_edge_length(c, a, chord(c, a));
    }
    mesh.finalize();
    return mesh;
}

TriMesh flat_torus_mesh(double w1x, double w1y, double w2x, double w2y, int n) {
    if (n < 3) throw input_error("flat torus grid must have n >= 3");
    if (!(w1x * w2y - w1y * w2x > 0.0))
        throw input_error("flat torus generators must be positively oriented");
    const double e1x = w1x / n, e1y = w1y / n;
    const double e2x = w2x / n, e2y = w2y / n;
    const double l1 = std::hypot(e1x, e1y);
    const double l2 = std::hypot(e2x, e2y);
    const double ld = std::hypot(e1x + e2x, e1y + e2y);
    TriMesh mesh;
    for (int i = 0; i < n * n; ++i) mesh.add_vertex();
    auto id = [&](int a, int b) { return ((a % n + n) % n) * n + ((b % n + n) % n); };
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const int v00 = id(a, b), v10 = id(a + 1, b);
            const int v11 = id(a + 1, b + 1), v01 = id(a, b + 1);
            mesh.add_face(v00, v10, v11);
            mesh.add_face(v00, v11, v01);
            mesh.set_edge_length(v00, v10, l1);
            mesh.set_edge_length(v10, v11, l2);
            mesh.set_edge_length(v00, v11, ld);
            mesh.set_edge_length(v00, v01, l2);
            mesh.set_edge_length(v01, v11, l1);
        }
    mesh.finalize();
    return mesh;
}

} // namespace horizon
