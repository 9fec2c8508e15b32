#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "codevo/common.hpp"

namespace codevo {

// ---------------------------------------------------------------------------
// Exact tensor decomposition checking
// ---------------------------------------------------------------------------

// A half-Gaussian integer (a + b*i)/2, stored as the two integer numerators.
// Closed under addition and multiplication (after denominator bookkeeping),
// which keeps decomposition checking exact.
struct HalfGaussian {
    long long re2 = 0;  // numerator of the real part (value = re2/2)
    long long im2 = 0;  // numerator of the imaginary part

    static HalfGaussian integer(long long v) { return {2 * v, 0}; }
    bool operator==(const HalfGaussian&) const = default;
};

// Rounds each part to the nearest multiple of 1/2; exact ties (odd multiples
// of 1/4) go to the even multiple, i.e. 0.75 -> 1.0 and 0.25 -> 0.0.
HalfGaussian round_to_half(std::complex<double> z);

// Dense 3D tensor of exact integers, indexed (u, v, w).
struct Tensor3D {
    int d0 = 0, d1 = 0, d2 = 0;
    std::vector<long long> entries;  // size d0*d1*d2, u-major

    long long at(int u, int v, int w) const {
        return entries[static_cast<std::size_t>((u * d1 + v) * d2 + w)];
    }
    long long& at(int u, int v, int w) {
        return entries[static_cast<std::size_t>((u * d1 + v) * d2 + w)];
    }
};

// The matrix-multiplication tensor <m,n,p>: first axis flattens A row-major
// ((i,j) -> i*n+j), second flattens B row-major ((k,l) -> k*p+l), third
// flattens C column-major ((q,r) -> r*m+q), and the entry is 1 iff j=k, l=r,
// i=q. With this convention, contracting a decomposition reproduces C = A*B.
Tensor3D matmul_tensor(int m, int n, int p);

// Rank-R decomposition: factor matrices with R columns each; rows must match
// the tensor axes (U: d0 rows, V: d1, W: d2).
struct Decomposition {
    int rank = 0;
    std::vector<std::vector<HalfGaussian>> U, V, W;  // [row][column]
};

struct DecompositionReport {
    bool exact = false;
    int rank = 0;
};

// exact iff sum_r U[:,r] (x) V[:,r] (x) W[:,r] equals t entrywise in exact
// arithmetic, with all imaginary parts vanishing. Throws ShapeMismatch.
DecompositionReport verify_decomposition(const Tensor3D& t, const Decomposition& d);

// The trivial rank-m*n*p decomposition (one term per scalar product).
Decomposition trivial_decomposition(int m, int n, int p);

// The classical 7-term decomposition of <2,2,2>.
Decomposition strassen_decomposition();

// Elementwise round_to_half over raw complex-valued factor matrices.
Decomposition round_decomposition(const std::vector<std::vector<std::complex<double>>>& u,
                                  const std::vector<std::vector<std::complex<double>>>& v,
                                  const std::vector<std::vector<std::complex<double>>>& w);

// Aggregates a multi-seed rank search: best (lowest) achieved rank negated,
// the fraction of seeds achieving it, and the fraction achieving any rank.
// With no successful seed, best_rank_neg falls back to -1e9.
MetricMap score_tensor_search(const std::vector<std::optional<int>>& per_seed_ranks);

// ---------------------------------------------------------------------------
// Step-function bounds (autoconvolution constants, minimum overlap)
// ---------------------------------------------------------------------------

// Piecewise-constant function on [lo, hi] with equally wide subintervals.
struct StepFunction {
    double lo = -0.25, hi = 0.25;
    std::vector<double> heights;

    double width() const { return (hi - lo) / static_cast<double>(heights.size()); }
};

// max_t (f*f)(t) / (integral f)^2 for nonnegative f. The autoconvolution of a
// step function is piecewise linear with knots on the width-w grid, so the
// maximum is attained at a knot; knot values come from the discrete height
// convolution scaled by w. Throws ZeroIntegral, NegativeHeight.
double autocorr_c1_upper(const StepFunction& f);

// ||f*f||_2^2 / (||f*f||_1 * ||f*f||_inf) for nonnegative f, everything
// integrated exactly on the knot grid (the square of a linear piece is
// quadratic). Throws ZeroIntegral, NegativeHeight.
double autocorr_c2_lower(const StepFunction& f);

// max_t |f*f(t)| / (integral f)^2 for signed f. Throws ZeroIntegral.
double autocorr_c3_upper(const StepFunction& f);

// Variational bound from an even eigenfunction combination: builds
// P(x) = sum_k coeffs[k] * H_{4k}(sqrt(2*pi) x) with physicists' Hermite
// polynomials (so each H_n(sqrt(2*pi)x) e^{-pi x^2} is a Fourier eigenfunction
// with eigenvalue (-i)^n), requires P(0) = 0, divides out the double root at
// the origin, and returns r_max^2 / (2*pi) where r_max is the largest positive
// root. Throws ConstraintViolated (P(0) != 0), NoPositiveRoot.
double uncertainty_bound(const std::vector<double>& coeffs);

// max_k integral of h(x)(1 - h(x+k)) dx for h on [0,2] with heights in [0,1]
// and unit mass; x and x+k both range over [0,2]. g(k) is piecewise linear in
// k with knots at multiples of the interval width, so the maximum is attained
// at an integer shift. Throws MassViolated, HeightRange.
double min_overlap_objective(const StepFunction& h, double mass_tol = 1e-9);

// 1 + log(|U-U| / |U+U|) / log(2 max(U) + 1) for a set of non-negative
// integers containing 0, subject to |U-U| <= 2 max(U) + 1. Throws
// ZeroNotInSet, DegenerateSet (max(U) < 1), SideConditionViolated.
double sumset_bound(const std::vector<long long>& u_set);

// ---------------------------------------------------------------------------
// Geometric verifiers
// ---------------------------------------------------------------------------

inline constexpr double kGeomTol = 1e-9;  // absolute tolerance on distances/areas

struct KissingReport {
    bool valid = false;
    int count = 0;
};

// Integer-point certificate: valid iff the minimum pairwise squared distance
// is at least the maximum squared norm (exact integer arithmetic). Throws
// ZeroPoint.
KissingReport verify_kissing(const std::vector<std::vector<long long>>& points);

struct Circle {
    double x = 0, y = 0, r = 0;
};

struct PackingReport {
    bool valid = false;
    double sum_radii = 0;
};

// Disjoint circles inside a rectangle of perimeter 4 with the given aspect
// ratio (width/height); aspect 1 is the unit square. Distances and margins
// are checked to kGeomTol. Non-positive radii make the packing invalid.
PackingReport verify_circle_packing(const std::vector<Circle>& circles, double aspect = 1.0);

struct Hexagon {
    double x = 0, y = 0, theta = 0;  // center and rotation, radians
};

// Unit-side regular hexagons inside a regular hexagon of side L centered at
// the origin with a vertex on the positive x-axis. Pairwise disjointness by
// separating-axis tests, containment by the outer hexagon's six half-planes.
bool verify_hexagon_packing(const std::vector<Hexagon>& hexes, double L);

// (max pairwise distance / min pairwise distance)^2. Throws DuplicatePoints,
// ShapeMismatch (mixed dimensions), TooFewPoints.
double ratio_objective(const std::vector<std::vector<double>>& points);

enum class HeilbronnVariant { triangle, convex };

// Smallest triangle area over all point triples. The triangle variant
// requires all points inside the fixed unit-area reference triangle with
// vertices (0,0), (1,0), (0,2) and returns the raw minimum area (throws
// OutsideRegion). The convex variant returns min area / hull area, using
// scale invariance to treat the hull as the unit-area convex region (throws
// CollinearAll when the hull is degenerate). Throws TooFewPoints.
double heilbronn_objective(const std::vector<std::array<double, 2>>& points,
                           HeilbronnVariant variant);

// ---------------------------------------------------------------------------
// Online bin packing
// ---------------------------------------------------------------------------

struct Resources {
    double cpu = 0, mem = 0;
};

// -1.0 * (cr + mr + mr/cr + cr/mr) with residuals cr = required.cpu/free.cpu,
// mr = required.mem/free.mem. Throws ZeroFree (a free component is <= 0) and
// ZeroResidual (a residual is 0, which makes the formula singular).
double binpack_score(const Resources& required, const Resources& free);

// Best-fit-by-cpu baseline: prefers the machine with the least cpu left over
// after placement.
double cpu_best_fit_score(const Resources& required, const Resources& free);

struct BinpackOutcome {
    long placed = 0;
    double stranded_cpu = 0;
    double stranded_mem = 0;

    double stranded_total() const { return stranded_cpu + stranded_mem; }
};

// Online placement: each job goes, in input order, to the feasible machine
// with the highest scorer value (lowest index wins ties); machines where the
// scorer is singular are skipped; unplaceable jobs are skipped. Afterwards a
// machine is stranded when it cannot fit the smallest job of the workload
// (componentwise minimum demand); its leftover cpu/mem are summed.
BinpackOutcome simulate_binpack(const std::vector<Resources>& jobs,
                                const std::vector<Resources>& machines,
                                const std::function<double(const Resources&, const Resources&)>& scorer);

struct BinpackFixture {
    std::vector<Resources> jobs;
    std::vector<Resources> machines;
};

// Frozen synthetic workload: 500 jobs with integer demands cpu in 1..8 and
// mem in 1..32 drawn from a splitmix64 stream, against 120 machines of
// capacity (16, 64). Fully determined by the seed so the numbers can be
// reproduced independently.
BinpackFixture make_binpack_fixture(std::uint64_t seed);

}  // namespace codevo
