#include "bnls/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "bnls/error.hpp"

namespace bnls {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

GridPtr Grid::create(int dim, int points_per_axis, double half_width)
{
    if (dim < 1 || dim > 3) {
        throw StructuralError("grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
    }
    if (!is_power_of_two(points_per_axis) || points_per_axis < 4) {
        throw StructuralError("points_per_axis must be a power of two >= 4, got " +
                              std::to_string(points_per_axis));
    }
    if (!(half_width > 0.0) || !std::isfinite(half_width)) {
        throw StructuralError("half_width must be positive and finite");
    }
    return GridPtr(new Grid(dim, points_per_axis, half_width));
}

Grid::Grid(int dim, int points_per_axis, double half_width)
    : dim_(dim),
      points_(points_per_axis),
      half_width_(half_width),
      spacing_(2.0 * half_width / points_per_axis),
      cell_volume_(std::pow(spacing_, dim)),
      cells_(1)
{
    for (int a = 0; a < dim_; ++a) cells_ *= static_cast<std::size_t>(points_);
    std::size_t s = 1;
    for (int a = dim_ - 1; a >= 0; --a) {
        strides_[a] = s;
        s *= static_cast<std::size_t>(points_);
    }

    const double dk = std::numbers::pi / half_width_;
    k_odd_.resize(points_);
    k_even_.resize(points_);
    for (int i = 0; i < points_; ++i) {
        const int m = frequency(i);
        k_even_[i] = dk * m;
        k_odd_[i] = (m == -points_ / 2) ? 0.0 : dk * m;
    }

    k_sq_.assign(cells_, 0.0);
    radius_.assign(cells_, 0.0);
    for (std::size_t idx = 0; idx < cells_; ++idx) {
        double k2 = 0.0;
        double r2 = 0.0;
        for (int a = 0; a < dim_; ++a) {
            const int i = axis_index(idx, a);
            k2 += k_even_[i] * k_even_[i];
            const double x = coordinate(i);
            r2 += x * x;
        }
        k_sq_[idx] = k2;
        radius_[idx] = std::sqrt(r2);
    }
}

bool Grid::dealias_keep(std::size_t flat) const
{
    for (int a = 0; a < dim_; ++a) {
        const int m = frequency(axis_index(flat, a));
        if (3 * std::abs(m) > points_) return false;
    }
    return true;
}

bool Grid::same_shape(const Grid& other) const
{
    return dim_ == other.dim_ && points_ == other.points_ && half_width_ == other.half_width_;
}

void require_same_grid(const Grid& a, const Grid& b, const char* what)
{
    if (&a == &b || a.same_shape(b)) return;
    std::ostringstream msg;
    msg << what << ": grid mismatch (" << a.dim() << "d/" << a.points_per_axis() << "/L="
        << a.half_width() << " vs " << b.dim() << "d/" << b.points_per_axis()
        << "/L=" << b.half_width() << ")";
    throw StructuralError(msg.str());
}

}  // namespace bnls
