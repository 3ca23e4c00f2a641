#pragma once

#include "hjgraph/graph.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace hjgraph {

/// Ordered vertex pair (i < j), 0-based. Shifting by +h along the pair moves
/// mass h from vertex j to vertex i.
struct VertexPair {
    int i = 0;
    int j = 0;
};

/// Innermost nested sublevel set a (site, direction) belongs to.
enum class Region { BoundaryLayer = 0, InteriorH = 1, Interior2h = 2, Interior3h = 3 };

std::string to_string(Region region);

/// s^k = xi_1 + ... + xi_k for k = 1..d-1.
std::vector<double> pi_forward(const SimplexPoint& xi);

/// xi_k = s^k - s^{k-1} with s^0 = 0 and s^d = 1.
SimplexPoint pi_inverse(std::span<const double> s);

/// Binomial C(n, k) with overflow saturation at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Simplex lattice at spacing h = 1/N in cumulative coordinates. Sites are the
/// nondecreasing integer tuples 0 <= c^1 <= ... <= c^{d-1} <= N (s = c h),
/// enumerated lexicographically. Immutable after construction.
class Lattice {
public:
    static constexpr std::size_t kDefaultSiteBudget = 5'000'000;

    /// Throws std::invalid_argument for d < 2 or N < 2, std::length_error when
    /// the site count exceeds site_budget.
    static std::shared_ptr<const Lattice> build(int d, int N,
                                                std::size_t site_budget = kDefaultSiteBudget);

    int d() const noexcept { return d_; }
    int N() const noexcept { return n_; }
    double h() const noexcept { return h_; }
    /// Cell volume h^{d-1} used by the lattice quadrature.
    double cell_volume() const noexcept { return cell_volume_; }
    std::size_t size() const noexcept { return num_sites_; }

    /// Integer cumulative coordinates of a site (length d-1).
    std::span<const int> coords(std::size_t site) const;
    /// Integer vertex masses n_k = c^k - c^{k-1} (length d); xi_k = n_k h.
    std::vector<int> masses(std::size_t site) const;
    std::vector<double> cumulative(std::size_t site) const;
    SimplexPoint xi(std::size_t site) const;
    /// True when some vertex carries zero mass.
    bool on_boundary(std::size_t site) const { return boundary_[site] != 0; }

    std::optional<std::size_t> find(std::span<const int> coords) const;
    /// Site holding xi exactly (within 1e-9 per cumulative coordinate), if any.
    std::optional<std::size_t> locate(const SimplexPoint& xi) const;

    /// Site at s +/- h m_{i,j}, or nullopt when that point leaves the simplex.
    std::optional<std::size_t> shift(std::size_t site, VertexPair pair, int sign) const;

    /// Raw neighbour index (-1 when the shift exits) for hot loops.
    std::int64_t neighbour(std::size_t site, VertexPair pair, int sign) const {
        const auto& table = sign > 0 ? plus_ : minus_;
        return table[pair_index(pair) * num_sites_ + site];
    }

    Region classify(std::size_t site, VertexPair pair) const;

    std::size_t pair_index(VertexPair pair) const {
        return static_cast<std::size_t>(pair_offset_[static_cast<std::size_t>(pair.i)] + (pair.j - pair.i - 1));
    }

private:
    Lattice(int d, int N);

    int d_ = 0;
    int n_ = 0;
    double h_ = 0.0;
    double cell_volume_ = 0.0;
    std::size_t num_sites_ = 0;
    std::vector<int> coords_;
    std::vector<char> boundary_;
    std::map<std::vector<int>, std::size_t> index_;
    std::vector<int> pair_offset_;
    std::vector<std::int64_t> plus_;
    std::vector<std::int64_t> minus_;
};

/// Scalar values on lattice sites.
struct Field {
    std::shared_ptr<const Lattice> lattice;
    std::vector<double> values;

    Field() = default;
    explicit Field(std::shared_ptr<const Lattice> lat, double fill = 0.0);
    Field(std::shared_ptr<const Lattice> lat, std::vector<double> vals);

    std::size_t size() const noexcept { return values.size(); }
    double& operator[](std::size_t k) { return values[k]; }
    double operator[](std::size_t k) const { return values[k]; }
};

bool same_lattice(const Field& a, const Field& b);

/// Sum_x |v(x)| w(x) h^{d-1}. Throws std::invalid_argument on lattice mismatch.
double weighted_l1(const Field& field, const Field& weight);

/// Sum_x v(x) h^{d-1} with deterministic pairwise summation.
double lattice_integral(const Field& field);

double max_abs(const Field& field);

/// CSV: site_id, s_1..s_{d-1}, xi_1..xi_d, value (17 significant digits).
void write_field_csv(std::ostream& os, const Field& field);

}  // namespace hjgraph
