#include "fpfv/grid.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "fpfv/errors.hpp"

namespace fpfv {

double BoxDomain::volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < dim(); ++i) v *= upper[i] - lower[i];
    return v;
}

std::string to_string(Boundary bc) {
    switch (bc) {
        case Boundary::Periodic: return "periodic";
        case Boundary::Neumann: return "neumann";
        case Boundary::Dirichlet: return "dirichlet";
    }
    return "unknown";
}

Boundary parse_boundary(const std::string& name) {
    std::string s = name;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "periodic") return Boundary::Periodic;
    if (s == "neumann") return Boundary::Neumann;
    if (s == "dirichlet") return Boundary::Dirichlet;
    throw InvalidArgument("unknown boundary condition '" + name + "'");
}

Grid::Grid(BoxDomain domain, std::vector<std::size_t> counts, std::vector<Boundary> bc)
    : domain_(std::move(domain)), counts_(std::move(counts)), bc_(std::move(bc)) {
    const std::size_t d = domain_.lower.size();
    if (d < 1 || d > kMaxDim) throw InvalidArgument("grid dimension must be 1, 2 or 3");
    if (domain_.upper.size() != d || counts_.size() != d || bc_.size() != d)
        throw InvalidArgument("dimension mismatch between domain, counts and boundary conditions");
    for (std::size_t i = 0; i < d; ++i) {
        if (!(std::isfinite(domain_.lower[i]) && std::isfinite(domain_.upper[i])) ||
            !(domain_.lower[i] < domain_.upper[i]))
            throw InvalidArgument("degenerate box along axis " + std::to_string(i));
        if (counts_[i] < 2) throw InvalidArgument("need at least 2 cells along axis " + std::to_string(i));
    }
    h_.resize(d);
    cell_count_ = 1;
    cell_measure_ = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
        h_[i] = (domain_.upper[i] - domain_.lower[i]) / static_cast<double>(counts_[i]);
        cell_count_ *= counts_[i];
        cell_measure_ *= h_[i];
    }
    build_edges();
}

double Grid::max_spacing() const { return *std::max_element(h_.begin(), h_.end()); }

std::array<std::size_t, kMaxDim> Grid::multi_index(std::size_t cell) const {
    if (cell >= cell_count_) throw InvalidArgument("cell index out of range");
    std::array<std::size_t, kMaxDim> m{};
    for (std::size_t i = 0; i < dim(); ++i) {
        m[i] = cell % counts_[i];
        cell /= counts_[i];
    }
    return m;
}

std::size_t Grid::index_of(std::span<const std::size_t> multi) const {
    if (multi.size() < dim()) throw InvalidArgument("multi-index too short");
    std::size_t index = 0;
    for (std::size_t i = dim(); i-- > 0;) {
        if (multi[i] >= counts_[i]) throw InvalidArgument("multi-index out of range");
        index = index * counts_[i] + multi[i];
    }
    return index;
}

Point Grid::midpoint(std::size_t cell) const {
    const auto m = multi_index(cell);
    Point x{};
    for (std::size_t i = 0; i < dim(); ++i)
        x[i] = domain_.lower[i] + (static_cast<double>(m[i]) + 0.5) * h_[i];
    return x;
}

Point Grid::cell_lower(std::size_t cell) const {
    const auto m = multi_index(cell);
    Point x{};
    for (std::size_t i = 0; i < dim(); ++i) x[i] = domain_.lower[i] + static_cast<double>(m[i]) * h_[i];
    return x;
}

std::span<const Neighbor> Grid::neighbors(std::size_t cell) const {
    if (cell >= cell_count_) throw InvalidArgument("cell index out of range");
    return std::span<const Neighbor>(neighbor_list_)
        .subspan(neighbor_offsets_[cell], neighbor_offsets_[cell + 1] - neighbor_offsets_[cell]);
}

bool Grid::has_outflow_boundary() const noexcept {
    return std::any_of(bc_.begin(), bc_.end(), [](Boundary b) { return b == Boundary::Dirichlet; });
}

bool Grid::same_layout(const Grid& other) const {
    return domain_ == other.domain_ && counts_ == other.counts_ && bc_ == other.bc_;
}

void Grid::build_edges() {
    const std::size_t d = dim();
    std::vector<std::vector<Neighbor>> adjacency(cell_count_);

    auto face_measure = [&](std::size_t axis) {
        double m = 1.0;
        for (std::size_t j = 0; j < d; ++j)
            if (j != axis) m *= h_[j];
        return m;
    };

    for (std::size_t axis = 0; axis < d; ++axis) {
        const double measure = face_measure(axis);
        for (std::size_t cell = 0; cell < cell_count_; ++cell) {
            auto m = multi_index(cell);
            Point mid = midpoint(cell);

            if (m[axis] == 0 && bc_[axis] == Boundary::Dirichlet) {
                Edge e;
                e.cell_a = cell;
                e.axis = axis;
                e.normal_a = -1;
                e.measure = measure;
                e.midpoint = mid;
                e.midpoint[axis] = domain_.lower[axis];
                adjacency[cell].push_back({std::nullopt, edges_.size(), 1});
                edges_.push_back(e);
            }

            const bool last = m[axis] + 1 == counts_[axis];
            if (last && bc_[axis] == Boundary::Neumann) continue;

            Edge e;
            e.cell_a = cell;
            e.axis = axis;
            e.normal_a = 1;
            e.measure = measure;
            e.midpoint = mid;
            e.midpoint[axis] = last ? domain_.upper[axis]
                                    : domain_.lower[axis] + static_cast<double>(m[axis] + 1) * h_[axis];
            if (last && bc_[axis] == Boundary::Dirichlet) {
                adjacency[cell].push_back({std::nullopt, edges_.size(), 1});
            } else {
                m[axis] = last ? 0 : m[axis] + 1;
                const std::size_t other = index_of(std::span<const std::size_t>(m.data(), d));
                e.cell_b = other;
                adjacency[cell].push_back({other, edges_.size(), 1});
                adjacency[other].push_back({cell, edges_.size(), -1});
            }
            edges_.push_back(e);
        }
    }

    neighbor_offsets_.assign(cell_count_ + 1, 0);
    for (std::size_t c = 0; c < cell_count_; ++c) neighbor_offsets_[c + 1] = neighbor_offsets_[c] + adjacency[c].size();
    neighbor_list_.reserve(neighbor_offsets_.back());
    for (auto& list : adjacency) {
        std::sort(list.begin(), list.end(), [](const Neighbor& a, const Neighbor& b) { return a.edge < b.edge; });
        neighbor_list_.insert(neighbor_list_.end(), list.begin(), list.end());
    }
}

GridPtr build_grid(BoxDomain domain, std::vector<std::size_t> counts, std::vector<Boundary> bc) {
    return std::make_shared<const Grid>(std::move(domain), std::move(counts), std::move(bc));
}

GridPtr refine_grid(const Grid& grid, std::span<const std::size_t> factors) {
    if (factors.size() != grid.dim()) throw InvalidArgument("refinement factor count must match dimension");
    std::vector<std::size_t> counts(grid.counts().begin(), grid.counts().end());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (factors[i] == 0) throw InvalidArgument("refinement factor must be positive");
        counts[i] *= factors[i];
    }
    return build_grid(grid.domain(), std::move(counts),
                      std::vector<Boundary>(grid.boundaries().begin(), grid.boundaries().end()));
}

}  // namespace fpfv
