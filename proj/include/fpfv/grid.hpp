#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fpfv {

inline constexpr std::size_t kMaxDim = 3;

/// A point in state space. Components past the grid dimension are zero.
using Point = std::array<double, kMaxDim>;

/// Axis-aligned box [lower, upper) in state space.
struct BoxDomain {
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t dim() const noexcept { return lower.size(); }
    double volume() const;

    bool operator==(const BoxDomain&) const = default;
};

enum class Boundary {
    Periodic,   // opposite faces identified
    Neumann,    // zero normal flux, face is dropped
    Dirichlet,  // zero inflow, outflow leaves the domain
};

std::string to_string(Boundary bc);
Boundary parse_boundary(const std::string& name);

/// Interface between two cells, or between a cell and the outside of the
/// domain (Dirichlet faces only).
struct Edge {
    std::size_t cell_a = 0;
    std::optional<std::size_t> cell_b;  // empty for Dirichlet boundary faces
    std::size_t axis = 0;
    int normal_a = 1;  // sign of the normal from A into B along `axis`
    double measure = 0.0;
    Point midpoint{};

    bool is_boundary() const noexcept { return !cell_b.has_value(); }
};

/// One face of a cell seen from that cell.
struct Neighbor {
    std::optional<std::size_t> cell;  // empty: outflow boundary
    std::size_t edge = 0;
    int orientation = 1;  // +1 if this cell is the edge's A side, -1 if B
};

/// Uniform rectangular mesh on a box.
///
/// Cells are numbered row-major with axis 0 varying fastest:
/// index = i0 + n0 * (i1 + n1 * i2).
/// Edges are enumerated axis by axis; within an axis, for each cell in index
/// order, the lower Dirichlet face (if any) comes first, then the upper face.
/// Immutable after construction.
class Grid {
public:
    Grid(BoxDomain domain, std::vector<std::size_t> counts, std::vector<Boundary> bc);

    std::size_t dim() const noexcept { return domain_.dim(); }
    const BoxDomain& domain() const noexcept { return domain_; }
    std::span<const std::size_t> counts() const noexcept { return counts_; }
    std::span<const Boundary> boundaries() const noexcept { return bc_; }
    std::span<const double> spacing() const noexcept { return h_; }
    double max_spacing() const;

    std::size_t cell_count() const noexcept { return cell_count_; }
    double cell_measure() const noexcept { return cell_measure_; }

    std::array<std::size_t, kMaxDim> multi_index(std::size_t cell) const;
    std::size_t index_of(std::span<const std::size_t> multi) const;
    Point midpoint(std::size_t cell) const;
    Point cell_lower(std::size_t cell) const;

    std::span<const Edge> edges() const noexcept { return edges_; }
    std::span<const Neighbor> neighbors(std::size_t cell) const;

    bool has_outflow_boundary() const noexcept;

    /// Same box, counts and boundary kinds.
    bool same_layout(const Grid& other) const;

private:
    void build_edges();

    BoxDomain domain_;
    std::vector<std::size_t> counts_;
    std::vector<Boundary> bc_;
    std::vector<double> h_;
    std::size_t cell_count_ = 0;
    double cell_measure_ = 0.0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> neighbor_offsets_;
    std::vector<Neighbor> neighbor_list_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr build_grid(BoxDomain domain, std::vector<std::size_t> counts, std::vector<Boundary> bc);

/// The grid obtained by multiplying every cell count by factors[axis].
GridPtr refine_grid(const Grid& grid, std::span<const std::size_t> factors);

}  // namespace fpfv
