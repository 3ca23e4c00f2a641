#include "hjgraph/lattice.hpp"

#include "hjgraph/format.hpp"
#include "hjgraph/parallel.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace hjgraph {

std::string to_string(Region region) {
    switch (region) {
        case Region::BoundaryLayer: return "boundary_layer";
        case Region::InteriorH: return "interior_h";
        case Region::Interior2h: return "interior_2h";
        case Region::Interior3h: return "interior_3h";
    }
    return "unknown";
}

std::vector<double> pi_forward(const SimplexPoint& xi) {
    std::vector<double> s;
    s.reserve(xi.size() - 1);
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < xi.size(); ++k) {
        acc += xi[k];
        s.push_back(acc);
    }
    return s;
}

SimplexPoint pi_inverse(std::span<const double> s) {
    std::vector<double> xi;
    xi.reserve(s.size() + 1);
    double prev = 0.0;
    for (double v : s) {
        xi.push_back(v - prev);
        prev = v;
    }
    xi.push_back(1.0 - prev);
    return SimplexPoint(std::move(xi));
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        const std::uint64_t num = n - k + i;
        // result * num / i is exact at every step; guard the multiplication.
        if (result > std::numeric_limits<std::uint64_t>::max() / num) {
            return std::numeric_limits<std::uint64_t>::max();
        }
        result = result * num / i;
    }
    return result;
}

namespace {

void enumerate(int depth, int lo, int n, std::vector<int>& current, std::vector<int>& out) {
    if (depth == static_cast<int>(current.size())) {
        out.insert(out.end(), current.begin(), current.end());
        return;
    }
    for (int c = lo; c <= n; ++c) {
        current[static_cast<std::size_t>(depth)] = c;
        enumerate(depth + 1, c, n, current, out);
    }
}

}  // namespace

Lattice::Lattice(int d, int N) : d_(d), n_(N), h_(1.0 / N), cell_volume_(std::pow(1.0 / N, d - 1)) {}

std::shared_ptr<const Lattice> Lattice::build(int d, int N, std::size_t site_budget) {
    if (d < 2) throw std::invalid_argument("lattice needs d >= 2");
    if (N < 2) throw std::invalid_argument("lattice needs N >= 2");
    const std::uint64_t count = binomial(static_cast<std::uint64_t>(N + d - 1),
                                         static_cast<std::uint64_t>(d - 1));
    if (count > site_budget) {
        throw std::length_error("lattice with d=" + std::to_string(d) + ", N=" + std::to_string(N) +
                                " has " + std::to_string(count) + " sites, over the budget of " +
                                std::to_string(site_budget));
    }

    std::shared_ptr<Lattice> lat(new Lattice(d, N));
    const int dim = d - 1;
    std::vector<int> current(static_cast<std::size_t>(dim), 0);
    enumerate(0, 0, N, current, lat->coords_);
    lat->num_sites_ = lat->coords_.size() / static_cast<std::size_t>(dim);

    lat->boundary_.resize(lat->num_sites_);
    for (std::size_t s = 0; s < lat->num_sites_; ++s) {
        const auto c = lat->coords(s);
        lat->index_.emplace(std::vector<int>(c.begin(), c.end()), s);
        bool boundary = false;
        int prev = 0;
        for (int k = 0; k < dim; ++k) {
            if (c[static_cast<std::size_t>(k)] == prev) boundary = true;
            prev = c[static_cast<std::size_t>(k)];
        }
        if (prev == N) boundary = true;
        lat->boundary_[s] = boundary ? 1 : 0;
    }

    lat->pair_offset_.resize(static_cast<std::size_t>(d));
    int offset = 0;
    for (int i = 0; i < d; ++i) {
        lat->pair_offset_[static_cast<std::size_t>(i)] = offset;
        offset += d - i - 1;
    }
    const auto pairs = static_cast<std::size_t>(offset);
    lat->plus_.assign(pairs * lat->num_sites_, -1);
    lat->minus_.assign(pairs * lat->num_sites_, -1);

    std::vector<int> moved(static_cast<std::size_t>(dim));
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            const std::size_t p = lat->pair_index(VertexPair{i, j});
            for (std::size_t s = 0; s < lat->num_sites_; ++s) {
                const auto c = lat->coords(s);
                for (int sign : {+1, -1}) {
                    std::copy(c.begin(), c.end(), moved.begin());
                    // m_{i,j} has ones on cumulative coordinates i..j-1 (0-based).
                    for (int l = i; l < j; ++l) moved[static_cast<std::size_t>(l)] += sign;
                    bool inside = true;
                    int prev = 0;
                    for (int v : moved) {
                        if (v < prev) inside = false;
                        prev = v;
                    }
                    if (prev > N) inside = false;
                    if (!inside) continue;
                    const auto it = lat->index_.find(moved);
                    if (it == lat->index_.end()) {
                        throw std::logic_error("lattice shift landed off-lattice inside the simplex");
                    }
                    auto& table = sign > 0 ? lat->plus_ : lat->minus_;
                    table[p * lat->num_sites_ + s] = static_cast<std::int64_t>(it->second);
                }
            }
        }
    }
    return lat;
}

std::span<const int> Lattice::coords(std::size_t site) const {
    const auto dim = static_cast<std::size_t>(d_ - 1);
    return std::span<const int>(coords_.data() + site * dim, dim);
}

std::vector<int> Lattice::masses(std::size_t site) const {
    const auto c = coords(site);
    std::vector<int> m;
    m.reserve(static_cast<std::size_t>(d_));
    int prev = 0;
    for (int v : c) {
        m.push_back(v - prev);
        prev = v;
    }
    m.push_back(n_ - prev);
    return m;
}

std::vector<double> Lattice::cumulative(std::size_t site) const {
    std::vector<double> s;
    for (int v : coords(site)) s.push_back(static_cast<double>(v) / n_);
    return s;
}

SimplexPoint Lattice::xi(std::size_t site) const {
    std::vector<double> xi;
    for (int m : masses(site)) xi.push_back(static_cast<double>(m) / n_);
    return SimplexPoint(std::move(xi));
}

std::optional<std::size_t> Lattice::find(std::span<const int> c) const {
    const auto it = index_.find(std::vector<int>(c.begin(), c.end()));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> Lattice::locate(const SimplexPoint& xi) const {
    if (static_cast<int>(xi.size()) != d_) return std::nullopt;
    const auto s = pi_forward(xi);
    std::vector<int> c;
    for (double v : s) {
        const double scaled = v * n_;
        const double r = std::round(scaled);
        if (std::abs(scaled - r) > 1e-9 * n_) return std::nullopt;
        c.push_back(static_cast<int>(r));
    }
    return find(c);
}

std::optional<std::size_t> Lattice::shift(std::size_t site, VertexPair pair, int sign) const {
    const std::int64_t nb = neighbour(site, pair, sign);
    if (nb < 0) return std::nullopt;
    return static_cast<std::size_t>(nb);
}

Region Lattice::classify(std::size_t site, VertexPair pair) const {
    // depth(x) = 0 if a shift exits, else 1 + min(depth of both shifts), capped at 3.
    auto depth = [&](auto&& self, std::size_t s, int cap) -> int {
        if (cap == 0) return 0;
        const auto up = neighbour(s, pair, +1);
        const auto down = neighbour(s, pair, -1);
        if (up < 0 || down < 0) return 0;
        return 1 + std::min(self(self, static_cast<std::size_t>(up), cap - 1),
                            self(self, static_cast<std::size_t>(down), cap - 1));
    };
    return static_cast<Region>(depth(depth, site, 3));
}

Field::Field(std::shared_ptr<const Lattice> lat, double fill)
    : lattice(std::move(lat)), values(lattice ? lattice->size() : 0, fill) {}

Field::Field(std::shared_ptr<const Lattice> lat, std::vector<double> vals)
    : lattice(std::move(lat)), values(std::move(vals)) {
    if (!lattice || values.size() != lattice->size()) {
        throw std::invalid_argument("field length does not match the lattice site count");
    }
}

bool same_lattice(const Field& a, const Field& b) {
    if (!a.lattice || !b.lattice) return false;
    return a.lattice == b.lattice ||
           (a.lattice->d() == b.lattice->d() && a.lattice->N() == b.lattice->N());
}

double weighted_l1(const Field& field, const Field& weight) {
    if (!same_lattice(field, weight)) {
        throw std::invalid_argument("weighted_l1: fields live on different lattices");
    }
    std::vector<double> terms(field.size());
    for (std::size_t k = 0; k < field.size(); ++k) {
        terms[k] = std::abs(field[k]) * weight[k];
    }
    return parallel::pairwise_sum(terms) * field.lattice->cell_volume();
}

double lattice_integral(const Field& field) {
    return parallel::pairwise_sum(field.values) * field.lattice->cell_volume();
}

double max_abs(const Field& field) {
    double m = 0.0;
    for (double v : field.values) m = std::max(m, std::abs(v));
    return m;
}

void write_field_csv(std::ostream& os, const Field& field) {
    const Lattice& lat = *field.lattice;
    const int d = lat.d();
    os << "site_id";
    for (int k = 1; k < d; ++k) os << ",s_" << k;
    for (int k = 1; k <= d; ++k) os << ",xi_" << k;
    os << ",value\n";
    for (std::size_t s = 0; s < lat.size(); ++s) {
        os << s;
        for (double v : lat.cumulative(s)) os << ',' << format_real(v);
        for (int m : lat.masses(s)) os << ',' << format_real(static_cast<double>(m) / lat.N());
        os << ',' << format_real(field[s]) << '\n';
    }
}

}  // namespace hjgraph
