#include "codevo/bench_math.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace codevo {

namespace {

using Int = __int128;

struct GaussianInt {  // numerators: value = (re + im*i), used for 2x-scaled parts
    Int re = 0, im = 0;
};

GaussianInt mul(const GaussianInt& a, const GaussianInt& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

}  // namespace

HalfGaussian round_to_half(std::complex<double> z) {
    // nearbyint under the default rounding mode resolves exact ties to even,
    // which is what we want for the doubled values.
    return {static_cast<long long>(std::nearbyint(2.0 * z.real())),
            static_cast<long long>(std::nearbyint(2.0 * z.imag()))};
}

Tensor3D matmul_tensor(int m, int n, int p) {
    Tensor3D t;
    t.d0 = m * n;
    t.d1 = n * p;
    t.d2 = m * p;
    t.entries.assign(static_cast<std::size_t>(t.d0) * t.d1 * t.d2, 0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < p; ++l) t.at(i * n + j, j * p + l, l * m + i) = 1;
    return t;
}

DecompositionReport verify_decomposition(const Tensor3D& t, const Decomposition& d) {
    auto check_shape = [&](const std::vector<std::vector<HalfGaussian>>& f, int rows,
                           const char* which) {
        if (static_cast<int>(f.size()) != rows)
            throw Error("ShapeMismatch", std::string(which) + " row count does not match tensor");
        for (const auto& row : f)
            if (static_cast<int>(row.size()) != d.rank)
                throw Error("ShapeMismatch", std::string(which) + " column count does not match rank");
    };
    check_shape(d.U, t.d0, "U");
    check_shape(d.V, t.d1, "V");
    check_shape(d.W, t.d2, "W");

    // Each factor entry is numerator/2, so a triple product carries an eighth:
    // the decomposition is exact iff the numerator sum equals 8*t entrywise
    // with vanishing imaginary part.
    for (int u = 0; u < t.d0; ++u) {
        for (int v = 0; v < t.d1; ++v) {
            for (int w = 0; w < t.d2; ++w) {
                GaussianInt acc;
                for (int r = 0; r < d.rank; ++r) {
                    GaussianInt a{d.U[u][r].re2, d.U[u][r].im2};
                    GaussianInt b{d.V[v][r].re2, d.V[v][r].im2};
                    GaussianInt c{d.W[w][r].re2, d.W[w][r].im2};
                    GaussianInt prod = mul(mul(a, b), c);
                    acc.re += prod.re;
                    acc.im += prod.im;
                }
                if (acc.im != 0 || acc.re != Int(8) * t.at(u, v, w))
                    return {false, d.rank};
            }
        }
    }
    return {true, d.rank};
}

Decomposition trivial_decomposition(int m, int n, int p) {
    Decomposition d;
    d.rank = m * n * p;
    d.U.assign(static_cast<std::size_t>(m) * n, std::vector<HalfGaussian>(d.rank));
    d.V.assign(static_cast<std::size_t>(n) * p, std::vector<HalfGaussian>(d.rank));
    d.W.assign(static_cast<std::size_t>(m) * p, std::vector<HalfGaussian>(d.rank));
    int r = 0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < p; ++l, ++r) {
                d.U[i * n + j][r] = HalfGaussian::integer(1);
                d.V[j * p + l][r] = HalfGaussian::integer(1);
                d.W[l * m + i][r] = HalfGaussian::integer(1);
            }
    return d;
}

Decomposition strassen_decomposition() {
    // Rows follow the tensor axis conventions of matmul_tensor; columns are
    // the seven products. Values are whole integers (numerator = 2*value).
    static const int u[4][7] = {{1, 0, 1, 0, 1, -1, 0},
                                {0, 0, 0, 0, 1, 0, 1},
                                {0, 1, 0, 0, 0, 1, 0},
                                {1, 1, 0, 1, 0, 0, -1}};
    static const int v[4][7] = {{1, 1, 0, -1, 0, 1, 0},
                                {0, 0, 1, 0, 0, 1, 0},
                                {0, 0, 0, 1, 0, 0, 1},
                                {1, 0, -1, 0, 1, 0, 1}};
    static const int w[4][7] = {{1, 0, 0, 1, -1, 0, 1},
                                {0, 1, 0, 1, 0, 0, 0},
                                {0, 0, 1, 0, 1, 0, 0},
                                {1, -1, 1, 0, 0, 1, 0}};
    Decomposition d;
    d.rank = 7;
    d.U.assign(4, std::vector<HalfGaussian>(7));
    d.V.assign(4, std::vector<HalfGaussian>(7));
    d.W.assign(4, std::vector<HalfGaussian>(7));
    for (int row = 0; row < 4; ++row)
        for (int col = 0; col < 7; ++col) {
            d.U[row][col] = HalfGaussian::integer(u[row][col]);
            d.V[row][col] = HalfGaussian::integer(v[row][col]);
            d.W[row][col] = HalfGaussian::integer(w[row][col]);
        }
    return d;
}

Decomposition round_decomposition(const std::vector<std::vector<std::complex<double>>>& u,
                                  const std::vector<std::vector<std::complex<double>>>& v,
                                  const std::vector<std::vector<std::complex<double>>>& w) {
    Decomposition d;
    d.rank = u.empty() ? 0 : static_cast<int>(u[0].size());
    auto convert = [](const std::vector<std::vector<std::complex<double>>>& raw) {
        std::vector<std::vector<HalfGaussian>> out(raw.size());
        for (std::size_t i = 0; i < raw.size(); ++i) {
            out[i].reserve(raw[i].size());
            for (auto z : raw[i]) out[i].push_back(round_to_half(z));
        }
        return out;
    };
    d.U = convert(u);
    d.V = convert(v);
    d.W = convert(w);
    return d;
}

MetricMap score_tensor_search(const std::vector<std::optional<int>>& per_seed_ranks) {
    if (per_seed_ranks.empty()) throw Error("ConfigError", "no seeds to score");
    int best = 0;
    long succeeded = 0, at_best = 0;
    for (const auto& r : per_seed_ranks) {
        if (!r) continue;
        if (succeeded == 0 || *r < best) best = *r;
        ++succeeded;
    }
    for (const auto& r : per_seed_ranks)
        if (r && *r == best && succeeded > 0) ++at_best;
    double n = static_cast<double>(per_seed_ranks.size());
    MetricMap m;
    m["best_rank_neg"] = succeeded > 0 ? -static_cast<double>(best) : -1e9;
    m["fraction_at_best"] = static_cast<double>(at_best) / n;
    m["success_rate"] = static_cast<double>(succeeded) / n;
    return m;
}

namespace {

// Knot values of the autoconvolution f*f on the grid 2*lo + k*w, k = 0..2n:
// val[k] = w * sum_{i+j=k-1} h_i h_j (zero at both ends).
std::vector<double> autoconv_knot_values(const StepFunction& f) {
    std::size_t n = f.heights.size();
    if (n == 0) throw Error("ZeroIntegral", "step function has no intervals");
    double w = f.width();
    std::vector<double> c(2 * n - 1, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) c[i + j] += f.heights[i] * f.heights[j];
    std::vector<double> val(2 * n + 1, 0.0);
    for (std::size_t k = 1; k < 2 * n; ++k) val[k] = w * c[k - 1];
    return val;
}

double integral_of(const StepFunction& f) {
    double s = 0.0;
    for (double h : f.heights) s += h;
    return f.width() * s;
}

void require_nonnegative(const StepFunction& f) {
    for (double h : f.heights)
        if (h < 0.0) throw Error("NegativeHeight", "heights must be nonnegative");
}

}  // namespace

double autocorr_c1_upper(const StepFunction& f) {
    require_nonnegative(f);
    double mass = integral_of(f);
    if (mass <= 0.0) throw Error("ZeroIntegral", "step function must have positive mass");
    auto val = autoconv_knot_values(f);
    return *std::max_element(val.begin(), val.end()) / (mass * mass);
}

double autocorr_c2_lower(const StepFunction& f) {
    require_nonnegative(f);
    double mass = integral_of(f);
    if (mass <= 0.0) throw Error("ZeroIntegral", "step function must have positive mass");
    auto val = autoconv_knot_values(f);
    double w = f.width();
    double linf = *std::max_element(val.begin(), val.end());
    double l1 = mass * mass;  // integral of f*f for nonnegative f
    double l2sq = 0.0;        // exact: the square of each linear piece is quadratic
    for (std::size_t k = 0; k + 1 < val.size(); ++k)
        l2sq += w * (val[k] * val[k] + val[k] * val[k + 1] + val[k + 1] * val[k + 1]) / 3.0;
    return l2sq / (l1 * linf);
}

double autocorr_c3_upper(const StepFunction& f) {
    double mass = integral_of(f);
    if (mass == 0.0) throw Error("ZeroIntegral", "step function must have nonzero mass");
    auto val = autoconv_knot_values(f);
    double peak = 0.0;
    for (double v : val) peak = std::max(peak, std::abs(v));
    return peak / (mass * mass);
}

namespace {

// Coefficient vector (index = power) of the physicists' Hermite polynomial,
// via H_{n+1} = 2u H_n - 2n H_{n-1}.
std::vector<double> hermite_coeffs(int n) {
    std::vector<double> prev = {1.0};
    if (n == 0) return prev;
    std::vector<double> cur = {0.0, 2.0};
    for (int k = 1; k < n; ++k) {
        std::vector<double> next(cur.size() + 1, 0.0);
        for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] += 2.0 * cur[i];
        for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= 2.0 * k * prev[i];
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

// Durand-Kerner iteration; coeffs[i] multiplies u^i.
std::vector<std::complex<double>> poly_roots(std::vector<double> coeffs) {
    while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
    std::size_t deg = coeffs.size() - 1;
    std::vector<std::complex<double>> roots;
    if (deg < 1) return roots;
    std::vector<std::complex<double>> a(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) a[i] = coeffs[i] / coeffs.back();
    auto eval = [&](std::complex<double> z) {
        std::complex<double> acc = 0.0;
        for (std::size_t i = a.size(); i-- > 0;) acc = acc * z + a[i];
        return acc;
    };
    roots.resize(deg);
    std::complex<double> seed(0.4, 0.9);
    roots[0] = seed;
    for (std::size_t j = 1; j < deg; ++j) roots[j] = roots[j - 1] * seed;
    for (int iter = 0; iter < 1000; ++iter) {
        double worst = 0.0;
        for (std::size_t j = 0; j < deg; ++j) {
            std::complex<double> denom = 1.0;
            for (std::size_t k = 0; k < deg; ++k)
                if (k != j) denom *= roots[j] - roots[k];
            std::complex<double> delta = eval(roots[j]) / denom;
            roots[j] -= delta;
            worst = std::max(worst, std::abs(delta) / (1.0 + std::abs(roots[j])));
        }
        if (worst < 1e-14) break;
    }
    return roots;
}

}  // namespace

double uncertainty_bound(const std::vector<double>& coeffs) {
    if (coeffs.empty()) throw Error("ConstraintViolated", "no coefficients given");
    // P as a polynomial in u = sqrt(2*pi) x; only even degrees appear.
    std::vector<double> p;
    double p0 = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        auto h = hermite_coeffs(static_cast<int>(4 * k));
        if (h.size() > p.size()) p.resize(h.size(), 0.0);
        for (std::size_t i = 0; i < h.size(); ++i) p[i] += coeffs[k] * h[i];
        p0 += coeffs[k] * h[0];
        scale += std::abs(coeffs[k] * h[0]);
    }
    if (scale == 0.0) throw Error("NoPositiveRoot", "zero polynomial");
    if (std::abs(p0) > 1e-6 * scale)
        throw Error("ConstraintViolated",
                    "P(0) = " + std::to_string(p0) + " is not zero; the combination must vanish at the origin");

    // Divide out the double root at the origin (odd coefficients are zero by
    // evenness; the constant term is zero up to the tolerance just checked).
    if (p.size() < 3) throw Error("NoPositiveRoot", "polynomial degree too low");
    std::vector<double> q(p.begin() + 2, p.end());

    double best = 0.0;
    bool found = false;
    for (const auto& root : poly_roots(q)) {
        if (std::abs(root.imag()) > 1e-7 * (1.0 + std::abs(root.real()))) continue;
        if (root.real() <= 1e-9) continue;
        best = std::max(best, root.real());
        found = true;
    }
    if (!found) throw Error("NoPositiveRoot", "P(x)/x^2 has no positive real root");
    // best is the root in u units; convert u = sqrt(2*pi) x back to x and
    // report r_max^2 / (2*pi).
    double two_pi = 2.0 * std::numbers::pi;
    double r_max_sq = best * best / two_pi;
    return r_max_sq / two_pi;
}

double min_overlap_objective(const StepFunction& h, double mass_tol) {
    std::size_t n = h.heights.size();
    if (n == 0) throw Error("MassViolated", "step function has no intervals");
    for (double v : h.heights)
        if (v < -1e-12 || v > 1.0 + 1e-12)
            throw Error("HeightRange", "heights must lie in [0,1]");
    double w = h.width();
    double mass = integral_of(h);
    if (std::abs(mass - 1.0) > mass_tol)
        throw Error("MassViolated", "integral must be 1, got " + std::to_string(mass));

    // g(k) is piecewise linear with knots at integer shifts k = m*w, so the
    // maximum over k is attained at one of them.
    double best = 0.0;
    for (long m = -static_cast<long>(n); m <= static_cast<long>(n); ++m) {
        double g = 0.0;
        for (long i = 0; i < static_cast<long>(n); ++i) {
            long j = i + m;
            if (j < 0 || j >= static_cast<long>(n)) continue;
            g += h.heights[static_cast<std::size_t>(i)] *
                 (1.0 - h.heights[static_cast<std::size_t>(j)]);
        }
        best = std::max(best, w * g);
    }
    return best;
}

double sumset_bound(const std::vector<long long>& u_set) {
    std::set<long long> u(u_set.begin(), u_set.end());
    if (u.empty() || !u.count(0)) throw Error("ZeroNotInSet", "the set must contain 0");
    long long max_u = *u.rbegin();
    if (max_u < 1) throw Error("DegenerateSet", "max(U) must be at least 1");
    for (long long x : u)
        if (x < 0) throw Error("DegenerateSet", "elements must be non-negative");
    std::set<long long> sums, diffs;
    for (long long a : u)
        for (long long b : u) {
            sums.insert(a + b);
            diffs.insert(a - b);
        }
    double window = 2.0 * static_cast<double>(max_u) + 1.0;
    if (static_cast<double>(diffs.size()) > window)
        throw Error("SideConditionViolated", "|U-U| exceeds 2*max(U)+1");
    return 1.0 + std::log(static_cast<double>(diffs.size()) / static_cast<double>(sums.size())) /
                     std::log(window);
}

KissingReport verify_kissing(const std::vector<std::vector<long long>>& points) {
    KissingReport rep;
    rep.count = static_cast<int>(points.size());
    if (points.empty()) {
        rep.valid = true;
        return rep;
    }
    std::size_t dim = points[0].size();
    long long max_norm = 0;
    for (const auto& p : points) {
        if (p.size() != dim) throw Error("ShapeMismatch", "points have mixed dimensions");
        long long norm = 0;
        for (long long x : p) norm += x * x;
        if (norm == 0) throw Error("ZeroPoint", "configuration contains the zero point");
        max_norm = std::max(max_norm, norm);
    }
    long long min_dist = -1;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            long long d = 0;
            for (std::size_t k = 0; k < dim; ++k) {
                long long diff = points[i][k] - points[j][k];
                d += diff * diff;
            }
            if (min_dist < 0 || d < min_dist) min_dist = d;
        }
    rep.valid = points.size() < 2 || min_dist >= max_norm;
    return rep;
}

PackingReport verify_circle_packing(const std::vector<Circle>& circles, double aspect) {
    PackingReport rep;
    if (aspect <= 0.0) return rep;
    double width = 2.0 * aspect / (1.0 + aspect);   // rectangle of perimeter 4
    double height = 2.0 / (1.0 + aspect);
    rep.valid = true;
    for (const auto& c : circles) {
        rep.sum_radii += c.r;
        if (c.r <= 0.0 || c.x < c.r - kGeomTol || c.x > width - c.r + kGeomTol ||
            c.y < c.r - kGeomTol || c.y > height - c.r + kGeomTol)
            rep.valid = false;
    }
    for (std::size_t i = 0; i < circles.size(); ++i)
        for (std::size_t j = i + 1; j < circles.size(); ++j) {
            double dx = circles[i].x - circles[j].x;
            double dy = circles[i].y - circles[j].y;
            if (std::sqrt(dx * dx + dy * dy) < circles[i].r + circles[j].r - kGeomTol)
                rep.valid = false;
        }
    return rep;
}

namespace {

std::array<std::array<double, 2>, 6> hex_vertices(const Hexagon& h) {
    std::array<std::array<double, 2>, 6> v;
    for (int k = 0; k < 6; ++k) {
        double ang = h.theta + k * std::numbers::pi / 3.0;
        v[static_cast<std::size_t>(k)] = {h.x + std::cos(ang), h.y + std::sin(ang)};
    }
    return v;
}

// Separating-axis test over both hexagons' edge normals.
bool hexes_disjoint(const std::array<std::array<double, 2>, 6>& a,
                    const std::array<std::array<double, 2>, 6>& b, double tol) {
    auto axes_of = [](const std::array<std::array<double, 2>, 6>& poly,
                      std::vector<std::array<double, 2>>& axes) {
        for (int k = 0; k < 6; ++k) {
            const auto& p = poly[static_cast<std::size_t>(k)];
            const auto& q = poly[static_cast<std::size_t>((k + 1) % 6)];
            double ex = q[0] - p[0], ey = q[1] - p[1];
            double len = std::sqrt(ex * ex + ey * ey);
            axes.push_back({-ey / len, ex / len});
        }
    };
    std::vector<std::array<double, 2>> axes;
    axes_of(a, axes);
    axes_of(b, axes);
    for (const auto& ax : axes) {
        double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
        for (const auto& p : a) {
            double d = p[0] * ax[0] + p[1] * ax[1];
            amin = std::min(amin, d);
            amax = std::max(amax, d);
        }
        for (const auto& p : b) {
            double d = p[0] * ax[0] + p[1] * ax[1];
            bmin = std::min(bmin, d);
            bmax = std::max(bmax, d);
        }
        if (amin >= bmax - tol || bmin >= amax - tol) return true;
    }
    return false;
}

}  // namespace

bool verify_hexagon_packing(const std::vector<Hexagon>& hexes, double L) {
    if (L <= 0.0) return false;
    double apothem = L * std::sqrt(3.0) / 2.0;
    std::vector<std::array<std::array<double, 2>, 6>> verts;
    verts.reserve(hexes.size());
    for (const auto& h : hexes) verts.push_back(hex_vertices(h));

    // Containment: every vertex inside all six half-planes of the outer
    // hexagon (vertex on the positive x-axis, so normals sit at 30 + k*60).
    for (const auto& poly : verts)
        for (const auto& p : poly)
            for (int k = 0; k < 6; ++k) {
                double ang = std::numbers::pi / 6.0 + k * std::numbers::pi / 3.0;
                if (p[0] * std::cos(ang) + p[1] * std::sin(ang) > apothem + kGeomTol) return false;
            }
    for (std::size_t i = 0; i < verts.size(); ++i)
        for (std::size_t j = i + 1; j < verts.size(); ++j)
            if (!hexes_disjoint(verts[i], verts[j], kGeomTol)) return false;
    return true;
}

double ratio_objective(const std::vector<std::vector<double>>& points) {
    if (points.size() < 2) throw Error("TooFewPoints", "need at least 2 points");
    std::size_t dim = points[0].size();
    for (const auto& p : points)
        if (p.size() != dim) throw Error("ShapeMismatch", "points have mixed dimensions");
    double min_sq = -1.0, max_sq = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            double d = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                double diff = points[i][k] - points[j][k];
                d += diff * diff;
            }
            if (min_sq < 0.0 || d < min_sq) min_sq = d;
            max_sq = std::max(max_sq, d);
        }
    if (min_sq == 0.0) throw Error("DuplicatePoints", "two points coincide");
    return max_sq / min_sq;
}

namespace {

double triple_area(const std::array<double, 2>& a, const std::array<double, 2>& b,
                   const std::array<double, 2>& c) {
    return std::abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])) / 2.0;
}

double hull_area(std::vector<std::array<double, 2>> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return 0.0;
    auto cross = [](const std::array<double, 2>& o, const std::array<double, 2>& a,
                    const std::array<double, 2>& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<std::array<double, 2>> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {  // lower chain
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {  // upper chain
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k > 0 ? k - 1 : 0);
    double area2 = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const auto& p = hull[i];
        const auto& q = hull[(i + 1) % hull.size()];
        area2 += p[0] * q[1] - q[0] * p[1];
    }
    return std::abs(area2) / 2.0;
}

}  // namespace

double heilbronn_objective(const std::vector<std::array<double, 2>>& points,
                           HeilbronnVariant variant) {
    if (points.size() < 3) throw Error("TooFewPoints", "need at least 3 points");
    if (variant == HeilbronnVariant::triangle) {
        // Reference region: the unit-area triangle (0,0), (1,0), (0,2).
        for (const auto& p : points)
            if (p[0] < -kGeomTol || p[1] < -kGeomTol || 2.0 * p[0] + p[1] > 2.0 + kGeomTol)
                throw Error("OutsideRegion", "point outside the reference triangle");
    }
    double min_area = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            for (std::size_t k = j + 1; k < points.size(); ++k) {
                double a = triple_area(points[i], points[j], points[k]);
                if (min_area < 0.0 || a < min_area) min_area = a;
            }
    if (variant == HeilbronnVariant::triangle) return min_area;
    double hull = hull_area(points);
    if (hull < 1e-12) throw Error("CollinearAll", "convex hull is degenerate");
    return min_area / hull;
}

double binpack_score(const Resources& required, const Resources& free) {
    if (free.cpu <= 0.0 || free.mem <= 0.0) throw Error("ZeroFree", "machine has no free resources");
    double cr = required.cpu / free.cpu;
    double mr = required.mem / free.mem;
    if (cr == 0.0 || mr == 0.0) throw Error("ZeroResidual", "zero residual makes the score singular");
    return -1.0 * (cr + mr + mr / cr + cr / mr);
}

double cpu_best_fit_score(const Resources& required, const Resources& free) {
    return -(free.cpu - required.cpu);
}

BinpackOutcome simulate_binpack(
    const std::vector<Resources>& jobs, const std::vector<Resources>& machines,
    const std::function<double(const Resources&, const Resources&)>& scorer) {
    BinpackOutcome out;
    std::vector<Resources> free = machines;
    for (const auto& job : jobs) {
        int best = -1;
        double best_score = 0.0;
        for (std::size_t i = 0; i < free.size(); ++i) {
            if (free[i].cpu < job.cpu || free[i].mem < job.mem) continue;
            double score;
            try {
                score = scorer(job, free[i]);
            } catch (const Error&) {
                continue;  // singular machines are filtered, not fatal
            }
            if (best < 0 || score > best_score) {
                best = static_cast<int>(i);
                best_score = score;
            }
        }
        if (best < 0) continue;  // unplaceable job is skipped
        free[static_cast<std::size_t>(best)].cpu -= job.cpu;
        free[static_cast<std::size_t>(best)].mem -= job.mem;
        ++out.placed;
    }
    if (jobs.empty()) return out;
    Resources probe{jobs[0].cpu, jobs[0].mem};
    for (const auto& job : jobs) {
        probe.cpu = std::min(probe.cpu, job.cpu);
        probe.mem = std::min(probe.mem, job.mem);
    }
    for (const auto& f : free)
        if (f.cpu < probe.cpu || f.mem < probe.mem) {
            out.stranded_cpu += f.cpu;
            out.stranded_mem += f.mem;
        }
    return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

BinpackFixture make_binpack_fixture(std::uint64_t seed) {
    BinpackFixture fx;
    std::uint64_t state = seed;
    fx.jobs.reserve(500);
    for (int i = 0; i < 500; ++i) {
        double cpu = 1.0 + static_cast<double>(splitmix64(state) % 8);
        double mem = 1.0 + static_cast<double>(splitmix64(state) % 32);
        fx.jobs.push_back({cpu, mem});
    }
    fx.machines.assign(120, Resources{16.0, 64.0});
    return fx;
}

}  // namespace codevo
