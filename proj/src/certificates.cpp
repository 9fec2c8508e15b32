#include "codevo/certificates.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

#include "codevo/bench_math.hpp"

namespace codevo {

namespace {

[[noreturn]] void malformed(const std::string& why) { throw Error("MalformedCertificate", why); }

// Content lines with comments and blanks stripped.
std::vector<std::string> payload_lines(const std::string& content) {
    std::vector<std::string> out;
    std::istringstream in(content);
    std::string line;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<std::string> tokens_of(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

double to_number(const std::string& tok) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        malformed("not a number: '" + tok + "'");
    }
    if (used != tok.size()) malformed("not a number: '" + tok + "'");
    if (!std::isfinite(v)) malformed("non-finite number: '" + tok + "'");
    return v;
}

long long to_integer(const std::string& tok) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(tok, &used);
    } catch (const std::exception&) {
        malformed("not an integer: '" + tok + "'");
    }
    if (used != tok.size()) malformed("not an integer: '" + tok + "'");
    return v;
}

// All numeric tokens of all lines, for the free-layout families.
std::vector<double> all_numbers(const std::vector<std::string>& lines) {
    std::vector<double> out;
    for (const auto& line : lines)
        for (const auto& tok : tokens_of(line)) out.push_back(to_number(tok));
    return out;
}

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

// Optional "<keyword> <numbers...>" header on the first line.
bool header_values(const std::vector<std::string>& lines, const std::string& keyword,
                   std::size_t count, std::vector<double>& values) {
    if (lines.empty()) return false;
    auto toks = tokens_of(lines.front());
    if (toks.empty() || toks[0] != keyword) return false;
    if (toks.size() != count + 1)
        malformed("'" + keyword + "' header needs " + std::to_string(count) + " value(s)");
    values.clear();
    for (std::size_t i = 1; i < toks.size(); ++i) values.push_back(to_number(toks[i]));
    return true;
}

// "x" (real) or "x,y" (complex), both parts multiples of 1/2.
HalfGaussian parse_half_entry(const std::string& tok) {
    auto half_of = [](const std::string& part) {
        double v = to_number(part);
        double doubled = v * 2.0;
        double snapped = std::round(doubled);
        if (std::abs(doubled - snapped) > 1e-9 || std::abs(snapped) > 1e15)
            malformed("entry '" + part + "' is not a multiple of 1/2");
        return static_cast<long long>(snapped);
    };
    auto comma = tok.find(',');
    HalfGaussian h;
    if (comma == std::string::npos) {
        h.re2 = half_of(tok);
    } else {
        h.re2 = half_of(tok.substr(0, comma));
        h.im2 = half_of(tok.substr(comma + 1));
    }
    return h;
}

VerifyOutcome check_decomposition(const std::vector<std::string>& lines) {
    std::vector<double> dims;
    if (!header_values(lines, "tensor", 3, dims)) malformed("expected 'tensor m n p' header");
    int m = static_cast<int>(dims[0]), n = static_cast<int>(dims[1]), p = static_cast<int>(dims[2]);
    if (m != dims[0] || n != dims[1] || p != dims[2] || m < 1 || n < 1 || p < 1)
        malformed("tensor dimensions must be positive integers");
    if (lines.size() < 2) malformed("expected 'rank R' header");
    auto rank_toks = tokens_of(lines[1]);
    if (rank_toks.size() != 2 || rank_toks[0] != "rank") malformed("expected 'rank R' header");
    long long rank = to_integer(rank_toks[1]);
    if (rank < 1) malformed("rank must be positive");

    Decomposition d;
    d.rank = static_cast<int>(rank);
    d.U.assign(static_cast<std::size_t>(m) * n, {});
    d.V.assign(static_cast<std::size_t>(n) * p, {});
    d.W.assign(static_cast<std::size_t>(p) * m, {});

    std::size_t pos = 2;
    auto factor_row = [&](const char* tag, std::vector<std::vector<HalfGaussian>>& target) {
        if (pos >= lines.size()) malformed(std::string("missing '") + tag + "' line in a term");
        auto toks = tokens_of(lines[pos++]);
        if (toks.empty() || toks[0] != tag)
            malformed(std::string("expected '") + tag + "' line, got '" + lines[pos - 1] + "'");
        if (toks.size() != target.size() + 1)
            malformed(std::string("'") + tag + "' line needs " + std::to_string(target.size()) +
                      " entries");
        for (std::size_t row = 0; row < target.size(); ++row)
            target[row].push_back(parse_half_entry(toks[row + 1]));
    };
    for (long long t = 0; t < rank; ++t) {
        if (pos >= lines.size() || lines[pos] != "term")
            malformed("expected 'term' for entry " + std::to_string(t + 1) + " of " +
                      std::to_string(rank));
        ++pos;
        factor_row("u", d.U);
        factor_row("v", d.V);
        factor_row("w", d.W);
    }
    if (pos != lines.size()) malformed("trailing content after the last term");

    auto report = verify_decomposition(matmul_tensor(m, n, p), d);
    if (!report.exact) return {1, "invalid: decomposition does not reproduce the tensor"};
    return {0, "valid, rank " + std::to_string(report.rank)};
}

VerifyOutcome check_kissing(const std::vector<std::string>& lines) {
    std::vector<double> dims;
    if (!header_values(lines, "dim", 1, dims)) malformed("expected 'dim d' header");
    int d = static_cast<int>(dims[0]);
    if (d != dims[0] || d < 1) malformed("dimension must be a positive integer");
    std::vector<std::vector<long long>> points;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto toks = tokens_of(lines[i]);
        if (toks.size() != static_cast<std::size_t>(d))
            malformed("point line " + std::to_string(i) + " needs " + std::to_string(d) +
                      " coordinates");
        std::vector<long long> pt;
        for (const auto& tok : toks) pt.push_back(to_integer(tok));
        points.push_back(std::move(pt));
    }
    if (points.empty()) malformed("no points");
    auto report = verify_kissing(points);
    if (!report.valid) return {1, "invalid: lemma inequality violated"};
    return {0, "valid, count " + std::to_string(report.count)};
}

VerifyOutcome check_circles(const std::vector<std::string>& lines) {
    double aspect = 1.0;
    std::size_t start = 0;
    std::vector<double> vals;
    if (header_values(lines, "aspect", 1, vals)) {
        aspect = vals[0];
        if (!(aspect > 0)) malformed("aspect must be positive");
        start = 1;
    }
    std::vector<Circle> circles;
    for (std::size_t i = start; i < lines.size(); ++i) {
        auto toks = tokens_of(lines[i]);
        if (toks.size() != 3) malformed("circle lines are 'x y r'");
        circles.push_back({to_number(toks[0]), to_number(toks[1]), to_number(toks[2])});
    }
    if (circles.empty()) malformed("no circles");
    auto report = verify_circle_packing(circles, aspect);
    if (!report.valid) return {1, "invalid: circles overlap or leave the rectangle"};
    return {0, "valid, sum_radii " + format_value(report.sum_radii)};
}

VerifyOutcome check_hexagons(const std::vector<std::string>& lines) {
    std::vector<double> vals;
    if (!header_values(lines, "side", 1, vals)) malformed("expected 'side L' header");
    double L = vals[0];
    if (!(L > 0)) malformed("side must be positive");
    std::vector<Hexagon> hexes;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto toks = tokens_of(lines[i]);
        if (toks.size() != 3) malformed("hexagon lines are 'x y theta'");
        hexes.push_back({to_number(toks[0]), to_number(toks[1]), to_number(toks[2])});
    }
    if (hexes.empty()) malformed("no hexagons");
    if (!verify_hexagon_packing(hexes, L))
        return {1, "invalid: hexagons overlap or leave the container"};
    return {0, "valid, count " + std::to_string(hexes.size()) + ", side " + format_value(L)};
}

std::vector<std::array<double, 2>> parse_points2d(const std::vector<std::string>& lines) {
    std::vector<std::array<double, 2>> points;
    for (const auto& line : lines) {
        auto toks = tokens_of(line);
        if (toks.size() != 2) malformed("point lines are 'x y'");
        points.push_back({to_number(toks[0]), to_number(toks[1])});
    }
    if (points.empty()) malformed("no points");
    return points;
}

VerifyOutcome check_heilbronn(const std::vector<std::string>& lines, HeilbronnVariant variant) {
    double v = heilbronn_objective(parse_points2d(lines), variant);
    return {0, "valid, objective " + format_value(v)};
}

VerifyOutcome check_ratio(const std::vector<std::string>& lines) {
    std::vector<double> dims;
    if (!header_values(lines, "dim", 1, dims)) malformed("expected 'dim d' header");
    int d = static_cast<int>(dims[0]);
    if (d != dims[0] || d < 1) malformed("dimension must be a positive integer");
    std::vector<std::vector<double>> points;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto toks = tokens_of(lines[i]);
        if (toks.size() != static_cast<std::size_t>(d))
            malformed("point line " + std::to_string(i) + " needs " + std::to_string(d) +
                      " coordinates");
        std::vector<double> pt;
        for (const auto& tok : toks) pt.push_back(to_number(tok));
        points.push_back(std::move(pt));
    }
    if (points.empty()) malformed("no points");
    double v = ratio_objective(points);
    return {0, "valid, objective " + format_value(v)};
}

StepFunction parse_step(const std::vector<std::string>& lines, double default_lo,
                        double default_hi) {
    StepFunction f;
    f.lo = default_lo;
    f.hi = default_hi;
    std::size_t start = 0;
    std::vector<double> vals;
    if (header_values(lines, "domain", 2, vals)) {
        f.lo = vals[0];
        f.hi = vals[1];
        start = 1;
    }
    if (!(f.hi > f.lo)) malformed("domain is empty");
    for (std::size_t i = start; i < lines.size(); ++i)
        for (const auto& tok : tokens_of(lines[i])) f.heights.push_back(to_number(tok));
    if (f.heights.empty()) malformed("no heights");
    return f;
}

VerifyOutcome check_step(const std::vector<std::string>& lines,
                         double (*objective)(const StepFunction&)) {
    double v = objective(parse_step(lines, -0.25, 0.25));
    return {0, "valid, objective " + format_value(v)};
}

VerifyOutcome check_min_overlap(const std::vector<std::string>& lines) {
    double v = min_overlap_objective(parse_step(lines, 0.0, 2.0));
    return {0, "valid, objective " + format_value(v)};
}

VerifyOutcome check_sumset(const std::vector<std::string>& lines) {
    std::vector<long long> set;
    for (const auto& line : lines)
        for (const auto& tok : tokens_of(line)) set.push_back(to_integer(tok));
    if (set.empty()) malformed("no elements");
    double v = sumset_bound(set);
    return {0, "valid, bound " + format_value(v)};
}

VerifyOutcome check_uncertainty(const std::vector<std::string>& lines) {
    auto coeffs = all_numbers(lines);
    if (coeffs.empty()) malformed("no coefficients");
    double v = uncertainty_bound(coeffs);
    return {0, "valid, bound " + format_value(v)};
}

double c1_adapter(const StepFunction& f) { return autocorr_c1_upper(f); }
double c2_adapter(const StepFunction& f) { return autocorr_c2_lower(f); }
double c3_adapter(const StepFunction& f) { return autocorr_c3_upper(f); }

}  // namespace

const std::vector<std::string>& certificate_problems() {
    static const std::vector<std::string> names = {
        "decomposition", "kissing",     "circles", "hexagons", "heilbronn_triangle",
        "heilbronn_convex", "ratio",    "step_c1", "step_c2",  "step_c3",
        "min_overlap",   "sumset",      "uncertainty"};
    return names;
}

VerifyOutcome verify_certificate(const std::string& problem, const std::string& content) {
    try {
        auto lines = payload_lines(content);
        if (problem == "decomposition") return check_decomposition(lines);
        if (problem == "kissing") return check_kissing(lines);
        if (problem == "circles") return check_circles(lines);
        if (problem == "hexagons") return check_hexagons(lines);
        if (problem == "heilbronn_triangle")
            return check_heilbronn(lines, HeilbronnVariant::triangle);
        if (problem == "heilbronn_convex") return check_heilbronn(lines, HeilbronnVariant::convex);
        if (problem == "ratio") return check_ratio(lines);
        if (problem == "step_c1") return check_step(lines, &c1_adapter);
        if (problem == "step_c2") return check_step(lines, &c2_adapter);
        if (problem == "step_c3") return check_step(lines, &c3_adapter);
        if (problem == "min_overlap") return check_min_overlap(lines);
        if (problem == "sumset") return check_sumset(lines);
        if (problem == "uncertainty") return check_uncertainty(lines);
        return {2, "UnknownProblem: '" + problem + "'"};
    } catch (const Error& e) {
        // what() is already "Code: message".
        if (e.code() == "MalformedCertificate") return {2, e.what()};
        // A verifier rejected the parsed certificate on mathematical grounds.
        return {1, std::string("invalid: ") + e.what()};
    }
}

}  // namespace codevo
