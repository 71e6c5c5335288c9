#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "loewner_lab/rng.hpp"

namespace loewner_lab {

// ---------------------------------------------------------------- hexagonal lattice

// Axial coordinates of a hexagon; centre at (sqrt3 (q + r/2), 3r/2).
struct Hex {
    int q = 0;
    int r = 0;
    friend bool operator==(Hex a, Hex b) { return a.q == b.q && a.r == b.r; }
    friend Hex operator+(Hex a, Hex b) { return {a.q + b.q, a.r + b.r}; }
    friend Hex operator-(Hex a, Hex b) { return {a.q - b.q, a.r - b.r}; }
};

// Neighbour offsets in counter-clockwise order, starting east.
inline constexpr std::array<Hex, 6> hex_dirs{{{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}}};

std::complex<double> hex_center(Hex h);

enum class HexState : std::uint8_t { outside = 0, undecided = 1, black = 2, white = 3 };

// A finite set of hexagons. Pre-coloured cells form the boundary; undecided
// cells are the inner hexagons and must have all six neighbours in the
// domain. The exploration starts on the edge between start_left (black) and
// start_right (white), walking with black on its left.
class HexDomain {
public:
    HexDomain() = default;
    HexDomain(const std::vector<std::pair<Hex, HexState>>& cells, Hex start_left, Hex start_right);

    // W x H rectangle in odd-row offset layout. Left column black, right
    // column white, top and bottom rows split at the middle; the interface
    // runs from the middle of the bottom side to the middle of the top side.
    static HexDomain rectangle(int width, int height);

    // The given inner cells surrounded by their one-cell ring, the ring
    // split by angle into a black half and a white half.
    static HexDomain ring(const std::vector<Hex>& inner);

    HexState state(Hex h) const;
    HexState initial_state(Hex h) const;
    bool contains(Hex h) const { return state(h) != HexState::outside; }
    void set(Hex h, HexState s);

    Hex start_left() const { return left0_; }
    Hex start_right() const { return right0_; }
    int start_dir() const { return dir0_; }
    std::size_t inner_count() const;
    std::vector<Hex> cells() const;
    std::size_t cell_count() const { return cells().size(); }

private:
    std::size_t index(Hex h) const;
    bool in_box(Hex h) const;
    void validate() const;

    int q0_ = 0, r0_ = 0, nq_ = 0, nr_ = 0;
    std::vector<std::uint8_t> state_, initial_;
    Hex left0_{}, right0_{};
    int dir0_ = 0;
};

struct InterfacePath {
    std::vector<std::complex<double>> vertices;  // a first, b last
    std::vector<std::pair<Hex, Hex>> edges;      // (black left, white right) per step
    std::vector<std::pair<Hex, HexState>> decided;  // inner cells in the order they were coloured
    std::size_t length() const { return edges.size(); }
};

enum class NavigatorVariant { harmonic, anti, percolation_nav, boundary_harmonic };

const char* navigator_name(NavigatorVariant v);

InterfacePath percolation_interface(HexDomain d, Rng& rng);
InterfacePath percolation_interface(const HexDomain& d, std::uint64_t seed);

InterfacePath navigator_interface(HexDomain d, Rng& rng, NavigatorVariant variant);
InterfacePath navigator_interface(const HexDomain& d, std::uint64_t seed, NavigatorVariant variant);

// Deterministic exploration for a complete colouring of the inner cells.
InterfacePath explore_coloured(HexDomain d);

// ---------------------------------------------------------------- loop erasure

// Chronological loop erasure: whenever a term repeats, the loop back to its
// earlier occurrence is cut. This removes loops in the same order as
// repeatedly erasing the first closed loop.
template <class T, class Hash = std::hash<T>, class Eq = std::equal_to<T>>
std::vector<T> loop_erase(const std::vector<T>& seq) {
    std::vector<T> out;
    std::unordered_map<T, std::size_t, Hash, Eq> where;
    out.reserve(seq.size());
    for (const T& x : seq) {
        auto it = where.find(x);
        if (it == where.end()) {
            where.emplace(x, out.size());
            out.push_back(x);
            continue;
        }
        const std::size_t keep = it->second + 1;
        for (std::size_t i = keep; i < out.size(); ++i) where.erase(out[i]);
        out.resize(keep);
    }
    return out;
}

// ---------------------------------------------------------------- square lattice walks

struct Site {
    int x = 0;
    int y = 0;
    friend bool operator==(Site a, Site b) { return a.x == b.x && a.y == b.y; }
    friend Site operator+(Site a, Site b) { return {a.x + b.x, a.y + b.y}; }
    friend Site operator-(Site a, Site b) { return {a.x - b.x, a.y - b.y}; }
};

struct SiteHash {
    std::size_t operator()(Site s) const noexcept {
        return static_cast<std::size_t>(Rng::mix64((static_cast<std::uint64_t>(static_cast<std::uint32_t>(s.x)) << 32) ^
                                                   static_cast<std::uint32_t>(s.y)));
    }
};

inline constexpr std::array<Site, 4> square_dirs{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};

enum class WalkBoundary { reflecting, annihilating, bessel3 };

struct LatticeWalk {
    std::vector<Site> sites;
    WalkBoundary mode = WalkBoundary::bessel3;
    std::uint64_t raw_steps = 0;  // steps of the underlying random walk
    std::size_t length() const { return sites.empty() ? 0 : sites.size() - 1; }
};

std::vector<Site> loop_erase_sites(const std::vector<Site>& walk);

// Walk from the origin: first step to (0,1), then horizontal steps with
// probability 1/2 and a discrete 3d Bessel vertical step otherwise. Loops
// are erased online; stops the first time altitude n is reached.
LatticeWalk lerw_halfplane(int n, Rng& rng);
LatticeWalk lerw_halfplane(int n, std::uint64_t seed);

// Simple walk in the upper half plane reflected at y = 0, stopped when it
// first leaves the disc of radius R; loop-erased.
LatticeWalk lerw_reflecting(double R, Rng& rng);

// Square-lattice domain: inner sites plus boundary points a and b.
struct SquareDomain {
    std::vector<Site> inner;
    Site a, b;
};

// Annihilating boundary: walks leave a, are discarded when they hit any
// non-inner site other than b, and are loop-erased on reaching b.
LatticeWalk lerw_domain(const SquareDomain& d, Rng& rng, std::uint64_t max_restarts = 100000000);

struct PathWeight {
    std::vector<Site> path;
    double probability = 0.0;
};

// Exact loop-erased path law from weighting every a-to-b walk by 4^{-l}.
// Summed by dynamic programming over (position, current erasure) until the
// unresolved mass drops below tail_tol. `tail` receives the leftover mass
// relative to the total.
std::vector<PathWeight> lerw_domain_exact(const SquareDomain& d, double tail_tol = 1e-13,
                                          double* tail = nullptr);

// ---------------------------------------------------------------- SAW

// One pivot move: uniform pivot index in [0, N], uniform element of the
// 8-element point group. The rotated tail is accepted only if the walk
// stays self-avoiding; otherwise the input is returned unchanged.
std::vector<Site> saw_pivot(const std::vector<Site>& walk, Rng& rng, bool* accepted = nullptr);
std::vector<Site> saw_pivot(const std::vector<Site>& walk, std::uint64_t seed);

bool is_self_avoiding(const std::vector<Site>& walk);
std::vector<std::vector<Site>> enumerate_saws(int n);

struct SawStats {
    double mean_r2 = 0.0;       // mean squared end-to-end distance
    double acceptance = 0.0;
    std::size_t samples = 0;
};

// Pivot chain from a straight rod of n steps: `burn_in` moves, then a
// measurement every `stride` moves.
SawStats saw_pivot_chain(int n, std::size_t burn_in, std::size_t measurements, std::size_t stride,
                         Rng& rng);

// ---------------------------------------------------------------- triangle crossing

// Site percolation on the triangular lattice inside {i, j >= 0, i + j <= n},
// bottom row black, other sites fair coins. Returns the smallest i / n over
// far-side sites (i + j = n) joined to the bottom row by black sites. The
// corner (n, 0) always counts, so the result is at most 1. The crossing
// event for segment fraction x is result <= x.
double triangle_crossing_reach(int n, Rng& rng);

}  // namespace loewner_lab
