#ifndef ASDTORIC_LATTICE_HPP
#define ASDTORIC_LATTICE_HPP

// Exact integer combinatorics of the boundary data of a toric 4-orbifold.
//
// A fan is the ordered list S = {u_1, ..., u_k} of lattice vectors labelling
// the circle stabilizers of the boundary components of the orbit space. Rays
// are stored 0-based; ray(i) below is u_{i+1}. The wrap-around convention
// u_0 = -u_k is used everywhere a predecessor of u_1 is needed.

#include "errors.hpp"

#include <boost/rational.hpp>

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace asdtoric {

using Rational = boost::rational<std::int64_t>;

struct LatticeVector {
    std::int64_t a = 0;
    std::int64_t b = 0;

    friend constexpr bool operator==(const LatticeVector&, const LatticeVector&) = default;

    constexpr LatticeVector operator-() const { return {-a, -b}; }
    constexpr LatticeVector operator+(const LatticeVector& o) const { return {a + o.a, b + o.b}; }
    constexpr LatticeVector operator-(const LatticeVector& o) const { return {a - o.a, b - o.b}; }
    constexpr LatticeVector operator*(std::int64_t s) const { return {a * s, b * s}; }
};

constexpr std::int64_t det(const LatticeVector& u, const LatticeVector& v) { return u.a * v.b - u.b * v.a; }
constexpr std::int64_t dot(const LatticeVector& u, const LatticeVector& v) { return u.a * v.a + u.b * v.b; }

/// Annihilator rotated by -pi/2: (a, b) -> (b, -a). With this convention
/// perp(u).v == det(v, u).
constexpr LatticeVector perp(const LatticeVector& u) { return {u.b, -u.a}; }

struct FanData {
    std::vector<LatticeVector> rays;

    std::size_t size() const { return rays.size(); }
    const LatticeVector& ray(std::size_t i) const { return rays.at(i); }

    /// u_{i-1} for the 0-based ray index i, with u_0 = -u_k.
    LatticeVector previous(std::size_t i) const { return i == 0 ? -rays.back() : rays.at(i - 1); }

    friend bool operator==(const FanData&, const FanData&) = default;
};

struct OffsetData {
    std::vector<LatticeVector> offsets;
};

// --- validation -----------------------------------------------------------

enum class FanViolationKind { too_few_rays, zero_ray, dependent_consecutive, normalization };

struct FanViolation {
    FanViolationKind kind;
    std::size_t index; // 0-based ray index; for dependent_consecutive the second ray of the pair
    std::string message;
};

struct FanValidation {
    std::vector<FanViolation> violations;
    std::vector<std::string> notes; // non-fatal observations

    bool ok() const { return violations.empty(); }
};

inline std::string to_string(const LatticeVector& u)
{
    return "(" + std::to_string(u.a) + "," + std::to_string(u.b) + ")";
}

inline bool sector_normalized(const LatticeVector& u) { return u.b > 0 || (u.b == 0 && u.a > 0); }

/// Reports every violated invariant of a fan. Never throws.
inline FanValidation validate_fan(const FanData& fan)
{
    FanValidation report;
    const std::size_t k = fan.size();
    if (k < 2) {
        report.violations.push_back({FanViolationKind::too_few_rays, 0,
                                     "fan needs at least two rays, got " + std::to_string(k)});
    }
    for (std::size_t i = 0; i < k; ++i) {
        const auto& u = fan.rays[i];
        if (u == LatticeVector{}) {
            report.violations.push_back({FanViolationKind::zero_ray, i, "ray " + std::to_string(i + 1) + " is zero"});
            continue;
        }
        if (!sector_normalized(u)) {
            report.violations.push_back({FanViolationKind::normalization, i,
                                         "ray " + std::to_string(i + 1) + " " + to_string(u) +
                                             " is outside the half-sector (need b > 0, or (p,0) with p > 0)"});
        }
    }
    if (k >= 2) {
        for (std::size_t i = 0; i < k; ++i) {
            const auto& prev = fan.rays[(i + k - 1) % k];
            const auto& cur = fan.rays[i];
            if (det(prev, cur) == 0) {
                report.violations.push_back({FanViolationKind::dependent_consecutive, i,
                                             "rays " + to_string(prev) + " and " + to_string(cur) +
                                                 " are linearly dependent"});
            }
        }
        if (fan.rays.front().b != 0) {
            report.notes.push_back("first ray " + to_string(fan.rays.front()) +
                                   " is not of the form (p,0); the fixed-point chart convention u_1 = (p,0) "
                                   "does not apply to this labelling");
        }
    }
    return report;
}

inline void require_valid(const FanData& fan)
{
    auto report = validate_fan(fan);
    if (!report.ok()) {
        std::string msg = "invalid fan:";
        for (const auto& v : report.violations) msg += " " + v.message + ";";
        throw ValidationError(msg);
    }
}

// --- derived data -----------------------------------------------------------

/// v_i = u_i - u_{i-1} with u_0 = -u_k. The offsets telescope to 2 u_k.
inline OffsetData derive_offsets(const FanData& fan)
{
    require_valid(fan);
    OffsetData out;
    out.offsets.reserve(fan.size());
    for (std::size_t i = 0; i < fan.size(); ++i) out.offsets.push_back(fan.rays[i] - fan.previous(i));
    return out;
}

struct StructureGroups {
    std::vector<std::int64_t> edge_orders;   // p_i, one per boundary component
    std::vector<std::int64_t> vertex_orders; // |Gamma_i|, fixed point between u_{i-1} and u_i
};

inline StructureGroups structure_groups(const FanData& fan)
{
    require_valid(fan);
    StructureGroups out;
    for (std::size_t i = 0; i < fan.size(); ++i) {
        const auto& u = fan.rays[i];
        out.edge_orders.push_back(std::gcd(u.a, u.b));
        out.vertex_orders.push_back(std::abs(det(fan.previous(i), u)));
    }
    return out;
}

/// Satake's Poincare-Hopf count: each fixed point contributes 1/|Gamma_i|.
inline Rational orbifold_euler_characteristic(const FanData& fan)
{
    Rational chi{0};
    for (auto order : structure_groups(fan).vertex_orders) chi += Rational{1, order};
    return chi;
}

struct ConvexityReport {
    bool negative_definite = false;
    /// +1: every u_i^perp . u_{i-1} < 0 (canonical torus orientation);
    /// -1: every value > 0 (orientation-reversed labelling); 0: mixed.
    int orientation = 0;
    std::vector<std::int64_t> vertex_values; // u_i^perp . u_{i-1}, i = 1..k
};

inline ConvexityReport negative_definite_check(const FanData& fan)
{
    require_valid(fan);
    ConvexityReport out;
    for (std::size_t i = 0; i < fan.size(); ++i) out.vertex_values.push_back(dot(perp(fan.rays[i]), fan.previous(i)));
    const auto& vals = out.vertex_values;
    if (std::all_of(vals.begin(), vals.end(), [](auto s) { return s < 0; })) out.orientation = 1;
    else if (std::all_of(vals.begin(), vals.end(), [](auto s) { return s > 0; })) out.orientation = -1;
    out.negative_definite = out.orientation != 0;
    return out;
}

/// Index [Z^2 : <vectors>] by integer row reduction to echelon form.
/// Returns 0 when the vectors do not span a rank-2 sublattice.
inline std::int64_t sublattice_index(std::span<const LatticeVector> vectors)
{
    std::vector<std::array<std::int64_t, 2>> rows;
    rows.reserve(vectors.size());
    for (const auto& v : vectors) rows.push_back({v.a, v.b});

    std::int64_t index = 1;
    std::size_t pivot_row = 0;
    for (std::size_t col = 0; col < 2; ++col) {
        // Euclid on column `col` across rows [pivot_row, end).
        while (true) {
            std::size_t best = rows.size();
            for (std::size_t r = pivot_row; r < rows.size(); ++r) {
                if (rows[r][col] != 0 && (best == rows.size() || std::abs(rows[r][col]) < std::abs(rows[best][col])))
                    best = r;
            }
            if (best == rows.size()) return 0;
            std::swap(rows[pivot_row], rows[best]);
            bool reduced = true;
            for (std::size_t r = pivot_row + 1; r < rows.size(); ++r) {
                if (rows[r][col] == 0) continue;
                const std::int64_t q = rows[r][col] / rows[pivot_row][col];
                for (std::size_t c = 0; c < 2; ++c) rows[r][c] -= q * rows[pivot_row][c];
                if (rows[r][col] != 0) reduced = false;
            }
            if (reduced) break;
        }
        index *= std::abs(rows[pivot_row][col]);
        ++pivot_row;
    }
    return index;
}

struct FundamentalGroupData {
    bool simply_connected = false;
    std::int64_t deck_order = 0; // |Lambda / Lambda_S|
};

inline FundamentalGroupData fundamental_group_data(const FanData& fan)
{
    require_valid(fan);
    const auto index = sublattice_index(fan.rays);
    return {index == 1, index};
}

struct OrbifoldReport {
    std::vector<std::int64_t> edge_groups;
    std::vector<std::int64_t> vertex_groups;
    Rational euler_char{0};
    bool simply_connected = false;
    std::int64_t deck_order = 0;
    bool negative_definite = false;
    int orientation = 0;
    std::vector<std::int64_t> vertex_values;
};

inline OrbifoldReport orbifold_report(const FanData& fan)
{
    const auto groups = structure_groups(fan);
    const auto pi1 = fundamental_group_data(fan);
    const auto convex = negative_definite_check(fan);
    OrbifoldReport out;
    out.edge_groups = groups.edge_orders;
    out.vertex_groups = groups.vertex_orders;
    out.euler_char = orbifold_euler_characteristic(fan);
    out.simply_connected = pi1.simply_connected;
    out.deck_order = pi1.deck_order;
    out.negative_definite = convex.negative_definite;
    out.orientation = convex.orientation;
    out.vertex_values = convex.vertex_values;
    return out;
}

// --- Hirzebruch-Jung resolutions ---------------------------------------------

/// r/q = b_1 - 1/(b_2 - 1/(... - 1/b_s)), all b_j >= 2.
inline std::vector<std::int64_t> hirzebruch_jung_continued_fraction(std::int64_t r, std::int64_t q)
{
    if (r < 1 || q < 1 || q >= r || std::gcd(r, q) != 1)
        throw std::invalid_argument("continued fraction needs r > q >= 1 coprime");
    std::vector<std::int64_t> out;
    std::int64_t num = r, den = q;
    while (den != 0) {
        const std::int64_t b = (num + den - 1) / den; // ceil
        out.push_back(b);
        const std::int64_t rem = b * den - num;
        num = den;
        den = rem;
    }
    return out;
}

/// Minimal toric resolution of the cyclic quotient C^2 / (1/r)(1, q).
///
/// The cone is spanned by (r-q, r) and (1, 0); the resolution rays are the
/// lattice points on the compact boundary of the convex hull of the nonzero
/// lattice points of that cone. Rays are returned clockwise, so the result
/// has canonical orientation and the wrap vertex (the point at infinity of
/// the compactification) has order r.
inline FanData hirzebruch_jung_fan(std::int64_t r, std::int64_t q)
{
    if (r < 1) throw std::invalid_argument("hirzebruch_jung_fan: r must be >= 1");
    if (r == 1) return FanData{{{1, 1}, {1, 0}}};
    if (q < 1 || q >= r) throw std::invalid_argument("hirzebruch_jung_fan: need 1 <= q < r");
    if (std::gcd(r, q) != 1) throw std::invalid_argument("hirzebruch_jung_fan: r and q must be coprime");

    // In the basis where the cone is <e2, r e1 - q e2>: w_0 = e2, w_1 = e1,
    // w_{j+1} = b_j w_j - w_{j-1}. The unimodular map (x, y) -> (x + y, x)
    // carries that cone onto <(1,0), (r-q, r)>.
    const auto cf = hirzebruch_jung_continued_fraction(r, q);
    std::vector<LatticeVector> chain{{0, 1}, {1, 0}};
    for (auto b : cf) chain.push_back(chain.back() * b - chain[chain.size() - 2]);

    FanData fan;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) fan.rays.push_back({it->a + it->b, it->a});
    return fan;
}

// --- equivalence ------------------------------------------------------------

/// True iff a cyclic rotation of `b` is carried onto `a` by an integer matrix
/// of determinant +-1, rays compared up to sign.
inline bool equivalent_fans(const FanData& a, const FanData& b)
{
    const std::size_t k = a.size();
    if (k != b.size() || k < 2) return false;
    if (det(a.rays[0], a.rays[1]) == 0) return false;

    for (std::size_t shift = 0; shift < k; ++shift) {
        const auto& b0 = b.rays[shift];
        const auto& b1 = b.rays[(shift + 1) % k];
        const std::int64_t db = det(b0, b1);
        if (db == 0) continue;
        for (int s1 : {1, -1}) {
            for (int s2 : {1, -1}) {
                // M [s1 b0 | s2 b1] = [a0 | a1]  =>  M = A adj(B) / det(B)
                const LatticeVector c0 = b0 * s1, c1 = b1 * s2;
                const std::int64_t d = det(c0, c1);
                const auto& a0 = a.rays[0];
                const auto& a1 = a.rays[1];
                // adj(B) = [[c1.b, -c1.a], [-c0.b, c0.a]]
                const std::int64_t m00 = a0.a * c1.b - a1.a * c0.b;
                const std::int64_t m01 = -a0.a * c1.a + a1.a * c0.a;
                const std::int64_t m10 = a0.b * c1.b - a1.b * c0.b;
                const std::int64_t m11 = -a0.b * c1.a + a1.b * c0.a;
                if (m00 % d || m01 % d || m10 % d || m11 % d) continue;
                const std::int64_t n00 = m00 / d, n01 = m01 / d, n10 = m10 / d, n11 = m11 / d;
                if (std::abs(n00 * n11 - n01 * n10) != 1) continue;
                bool all = true;
                for (std::size_t i = 0; i < k && all; ++i) {
                    const auto& v = b.rays[(shift + i) % k];
                    const LatticeVector image{n00 * v.a + n01 * v.b, n10 * v.a + n11 * v.b};
                    all = image == a.rays[i] || image == -a.rays[i];
                }
                if (all) return true;
            }
        }
    }
    return false;
}

// --- named fans ---------------------------------------------------------------

namespace fans {

/// S^4 with the torus acting on C^2 = R^4.
inline FanData s4() { return FanData{{{1, 0}, {0, 1}}}; }

/// Weighted projective plane CP^2_{1,1,p}.
inline FanData weighted_projective_plane(std::int64_t p) { return FanData{{{1, 0}, {p, 1}, {0, 1}}}; }

/// (S^2 x S^2)/Z_2, the quotient by (1/2, 0) in the torus.
inline FanData s2xs2_mod_z2() { return FanData{{{2, 0}, {0, 1}, {2, 0}, {0, 1}}}; }

/// Compactified Gibbons-Hawking A_{k-1} multi-instanton: (m_i, n_i) = (1, k-i), i = 0..k.
inline FanData gibbons_hawking(std::int64_t k)
{
    if (k < 1) throw std::invalid_argument("gibbons_hawking: k must be >= 1");
    FanData fan;
    for (std::int64_t i = 0; i <= k; ++i) fan.rays.push_back({1, k - i});
    return fan;
}

} // namespace fans

} // namespace asdtoric

#endif // ASDTORIC_LATTICE_HPP
