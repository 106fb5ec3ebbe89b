#include "fpfv/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "fpfv/errors.hpp"
#include "fpfv/parallel.hpp"

namespace fpfv {

Density::Density(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw InvalidArgument("density needs a grid");
    if (values_.size() != grid_->cell_count()) throw GridMismatch("value count does not match cell count");
}

Density Density::zeros(GridPtr grid) {
    const std::size_t n = grid->cell_count();
    return Density(std::move(grid), std::vector<double>(n, 0.0));
}

Density Density::uniform(GridPtr grid) {
    const std::size_t n = grid->cell_count();
    const double value = 1.0 / grid->domain().volume();
    return Density(std::move(grid), std::vector<double>(n, value));
}

Density Density::from_masses(GridPtr grid, std::span<const double> masses) {
    const double inv = 1.0 / grid->cell_measure();
    std::vector<double> values(masses.size());
    std::transform(masses.begin(), masses.end(), values.begin(), [inv](double m) { return m * inv; });
    return Density(std::move(grid), std::move(values));
}

double Density::mass() const { return grid_->cell_measure() * deterministic_sum(values_); }

double Density::min_value() const { return *std::min_element(values_.begin(), values_.end()); }

std::vector<double> Density::mass_vector() const {
    const double measure = grid_->cell_measure();
    std::vector<double> m(values_.size());
    std::transform(values_.begin(), values_.end(), m.begin(), [measure](double p) { return p * measure; });
    return m;
}

Density project(const Pdf& pdf, GridPtr grid, Quadrature quadrature) {
    const Grid& g = *grid;
    const std::size_t d = g.dim();
    const auto h = g.spacing();
    std::vector<double> values(g.cell_count(), 0.0);

    GaussRule rule{{0.0}, {2.0}};
    if (quadrature.kind == Quadrature::Kind::Gauss) rule = gauss_legendre(quadrature.points);
    const std::size_t k = rule.nodes.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) total *= k;

    parallel_for(g.cell_count(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c) {
            const Point mid = g.midpoint(c);
            double avg = 0.0;
            for (std::size_t q = 0; q < total; ++q) {
                Point x = mid;
                double w = 1.0;
                std::size_t rem = q;
                for (std::size_t i = 0; i < d; ++i) {
                    const std::size_t node = rem % k;
                    rem /= k;
                    x[i] += 0.5 * h[i] * rule.nodes[node];
                    w *= 0.5 * rule.weights[node];
                }
                avg += w * pdf(x);
            }
            if (!std::isfinite(avg)) throw NonFiniteValue("non-finite cell average in cell " + std::to_string(c));
            if (avg < 0.0) throw InvalidArgument("negative cell average in cell " + std::to_string(c));
            values[c] = avg;
        }
    });
    return Density(std::move(grid), std::move(values));
}

Density normalize(const Density& density) {
    const double m = density.mass();
    if (!(m > 0.0) || !std::isfinite(m)) throw ZeroMass("cannot normalise a density with mass " + std::to_string(m));
    std::vector<double> values(density.values().begin(), density.values().end());
    for (double& v : values) v /= m;
    return Density(density.grid_ptr(), std::move(values));
}

Pdf gaussian_pdf(std::vector<double> mean, std::vector<double> covariance) {
    const std::size_t d = mean.size();
    if (d < 1 || d > kMaxDim) throw InvalidArgument("Gaussian dimension must be 1..3");
    if (covariance.size() == 1 && d > 1) {
        const double s = covariance[0];
        covariance.assign(d * d, 0.0);
        for (std::size_t i = 0; i < d; ++i) covariance[i * d + i] = s;
    }
    if (covariance.size() != d * d) throw InvalidArgument("covariance must be a scalar or d x d");

    // Cholesky factor L (row-major, lower).
    std::vector<double> chol(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = covariance[i * d + j];
            for (std::size_t k = 0; k < j; ++k) s -= chol[i * d + k] * chol[j * d + k];
            if (i == j) {
                if (!(s > 0.0)) throw InvalidArgument("covariance is not positive definite");
                chol[i * d + i] = std::sqrt(s);
            } else {
                chol[i * d + j] = s / chol[j * d + j];
            }
        }
    }
    double log_det = 0.0;
    for (std::size_t i = 0; i < d; ++i) log_det += 2.0 * std::log(chol[i * d + i]);
    const double log_norm = -0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + log_det);

    return [mean = std::move(mean), chol = std::move(chol), d, log_norm](const Point& x) {
        std::array<double, kMaxDim> y{};
        double q = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            double s = x[i] - mean[i];
            for (std::size_t k = 0; k < i; ++k) s -= chol[i * d + k] * y[k];
            y[i] = s / chol[i * d + i];
            q += y[i] * y[i];
        }
        return std::exp(log_norm - 0.5 * q);
    };
}

namespace {

// Integer refinement factors taking `coarse` to `fine`, or throws.
std::array<std::size_t, kMaxDim> refinement_factors(const Grid& coarse, const Grid& fine) {
    if (coarse.dim() != fine.dim() || !(coarse.domain() == fine.domain()))
        throw GridMismatch("densities live on different domains");
    std::array<std::size_t, kMaxDim> f{1, 1, 1};
    for (std::size_t i = 0; i < coarse.dim(); ++i) {
        const std::size_t nc = coarse.counts()[i];
        const std::size_t nf = fine.counts()[i];
        if (nf < nc || nf % nc != 0) throw GridMismatch("grids are not related by integer refinement");
        f[i] = nf / nc;
    }
    return f;
}

std::size_t coarse_index(const Grid& coarse, const Grid& fine, const std::array<std::size_t, kMaxDim>& factors,
                         std::size_t fine_cell) {
    auto m = fine.multi_index(fine_cell);
    for (std::size_t i = 0; i < fine.dim(); ++i) m[i] /= factors[i];
    return coarse.index_of(std::span<const std::size_t>(m.data(), fine.dim()));
}

bool is_refinement_of(const Grid& fine, const Grid& coarse) {
    for (std::size_t i = 0; i < fine.dim(); ++i)
        if (fine.counts()[i] < coarse.counts()[i]) return false;
    return true;
}

}  // namespace

Density refine(const Density& density, const Grid& fine) {
    const Grid& coarse = density.grid();
    const auto factors = refinement_factors(coarse, fine);
    std::vector<double> values(fine.cell_count());
    for (std::size_t c = 0; c < fine.cell_count(); ++c) values[c] = density[coarse_index(coarse, fine, factors, c)];
    auto grid = std::make_shared<const Grid>(fine);
    return Density(std::move(grid), std::move(values));
}

double l1_distance(const Density& a, const Density& b) {
    if (a.grid_ptr() == b.grid_ptr() || a.grid().same_layout(b.grid())) {
        const double measure = a.grid().cell_measure();
        return measure * parallel_sum(a.grid().cell_count(), [&](std::size_t c) { return std::abs(a[c] - b[c]); });
    }
    const bool b_finer = is_refinement_of(b.grid(), a.grid());
    const Density& fine = b_finer ? b : a;
    const Density& coarse = b_finer ? a : b;
    const auto factors = refinement_factors(coarse.grid(), fine.grid());
    const double measure = fine.grid().cell_measure();
    return measure * parallel_sum(fine.grid().cell_count(), [&](std::size_t c) {
               return std::abs(fine[c] - coarse[coarse_index(coarse.grid(), fine.grid(), factors, c)]);
           });
}

double expectation(const Density& density, const Observable& g) {
    const Grid& grid = density.grid();
    return grid.cell_measure() * parallel_sum(grid.cell_count(), [&](std::size_t c) {
               const double value = g(grid.midpoint(c));
               if (!std::isfinite(value)) throw NonFiniteValue("observable is not finite at a cell midpoint");
               return density[c] * value;
           });
}

double Moments::stddev(std::size_t axis) const {
    const std::size_t d = mean.size();
    return std::sqrt(std::max(0.0, covariance[axis * d + axis]));
}

Moments moments(const Density& density) {
    const Grid& grid = density.grid();
    const std::size_t d = grid.dim();
    const double mass = density.mass();
    if (!(mass > 0.0) || !std::isfinite(mass)) throw ZeroMass("moments need a density with positive mass");
    Moments m;
    m.mean.resize(d);
    m.covariance.assign(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        m.mean[i] = expectation(density, [i](const Point& x) { return x[i]; }) / mass;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            const double mi = m.mean[i];
            const double mj = m.mean[j];
            double c = expectation(density, [=](const Point& x) { return (x[i] - mi) * (x[j] - mj); }) / mass;
            if (i == j) c += grid.spacing()[i] * grid.spacing()[i] / 12.0;
            m.covariance[i * d + j] = c;
            m.covariance[j * d + i] = c;
        }
    }
    return m;
}

Density marginal(const Density& density, std::size_t axis) {
    const Grid& grid = density.grid();
    if (axis >= grid.dim()) throw InvalidArgument("marginal axis out of range");
    const std::size_t n = grid.counts()[axis];
    double transverse = 1.0;
    for (std::size_t j = 0; j < grid.dim(); ++j)
        if (j != axis) transverse *= grid.spacing()[j];

    // Accumulate in canonical cell order for a fixed summation order.
    std::vector<double> values(n, 0.0);
    for (std::size_t c = 0; c < grid.cell_count(); ++c) values[grid.multi_index(c)[axis]] += density[c];
    for (double& v : values) v *= transverse;

    auto line = build_grid(BoxDomain{{grid.domain().lower[axis]}, {grid.domain().upper[axis]}}, {n},
                           {grid.boundaries()[axis]});
    return Density(std::move(line), std::move(values));
}

int count_modes(const Density& marginal, double min_prominence) {
    const Grid& grid = marginal.grid();
    if (grid.dim() != 1) throw InvalidArgument("count_modes expects a 1D density");
    const auto v = marginal.values();
    const std::size_t n = v.size();
    const double vmax = *std::max_element(v.begin(), v.end());
    if (!(vmax > 0.0)) return 0;
    const double threshold = min_prominence * vmax;
    const bool periodic = grid.boundaries()[0] == Boundary::Periodic;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });

    // Union-find over processed cells, sweeping from the top down. When two
    // components meet, the one with the lower peak dies at the current level.
    std::vector<std::ptrdiff_t> parent(n, -1);
    std::vector<double> peak(n, 0.0);
    auto find = [&](std::size_t i) {
        std::size_t r = i;
        while (static_cast<std::size_t>(parent[r]) != r) r = static_cast<std::size_t>(parent[r]);
        while (static_cast<std::size_t>(parent[i]) != r) {
            const std::size_t next = static_cast<std::size_t>(parent[i]);
            parent[i] = static_cast<std::ptrdiff_t>(r);
            i = next;
        }
        return r;
    };

    int modes = 1;
    for (std::size_t idx : order) {
        std::array<std::ptrdiff_t, 2> nbrs{-1, -1};
        if (idx > 0) nbrs[0] = static_cast<std::ptrdiff_t>(idx - 1);
        else if (periodic) nbrs[0] = static_cast<std::ptrdiff_t>(n - 1);
        if (idx + 1 < n) nbrs[1] = static_cast<std::ptrdiff_t>(idx + 1);
        else if (periodic) nbrs[1] = 0;

        std::vector<std::size_t> roots;
        for (std::ptrdiff_t nb : nbrs) {
            if (nb < 0 || parent[static_cast<std::size_t>(nb)] < 0) continue;
            const std::size_t r = find(static_cast<std::size_t>(nb));
            if (std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
        }

        if (roots.empty()) {
            parent[idx] = static_cast<std::ptrdiff_t>(idx);
            peak[idx] = v[idx];
            continue;
        }
        std::size_t high = roots[0];
        if (roots.size() == 2) {
            std::size_t low = roots[1];
            if (peak[low] > peak[high]) std::swap(low, high);
            const double prominence = peak[low] - v[idx];
            if (prominence > 0.0 && prominence >= threshold) ++modes;
            parent[low] = static_cast<std::ptrdiff_t>(high);
        }
        parent[idx] = static_cast<std::ptrdiff_t>(high);
    }
    return modes;
}

std::size_t mirror_cell(const Grid& grid, std::size_t cell) {
    for (std::size_t i = 0; i < grid.dim(); ++i) {
        const double lo = grid.domain().lower[i], hi = grid.domain().upper[i];
        if (std::abs(lo + hi) > 1e-12 * (hi - lo)) throw InvalidArgument("grid is not symmetric about the origin");
    }
    auto m = grid.multi_index(cell);
    for (std::size_t i = 0; i < grid.dim(); ++i) m[i] = grid.counts()[i] - 1 - m[i];
    return grid.index_of(std::span<const std::size_t>(m.data(), grid.dim()));
}

double point_symmetry_defect(const Density& density) {
    const Grid& grid = density.grid();
    double worst = 0.0;
    for (std::size_t c = 0; c < grid.cell_count(); ++c)
        worst = std::max(worst, std::abs(density[c] - density[mirror_cell(grid, c)]));
    return worst;
}

}  // namespace fpfv
