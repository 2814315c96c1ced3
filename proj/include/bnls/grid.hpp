#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace bnls {

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

/// Periodic box [-L, L)^dim sampled with points_per_axis points per axis.
/// Storage is row-major (last axis fastest). Wavenumbers follow the FFT
/// ordering m = 0, 1, ..., M/2-1, -M/2, ..., -1 with k = pi m / L.
class Grid {
public:
    static GridPtr create(int dim, int points_per_axis, double half_width);

    int dim() const { return dim_; }
    int points_per_axis() const { return points_; }
    double half_width() const { return half_width_; }
    double spacing() const { return spacing_; }
    std::size_t cell_count() const { return cells_; }
    double cell_volume() const { return cell_volume_; }

    double coordinate(int i) const { return -half_width_ + i * spacing_; }

    /// Wavenumber used for odd-order derivatives; the Nyquist entry is zero
    /// so that derivatives of real data stay real.
    double k_odd(int i) const { return k_odd_[i]; }
    /// Wavenumber used for even-order symbols (Nyquist entry kept).
    double k_even(int i) const { return k_even_[i]; }
    /// Integer FFT frequency m of axis index i.
    int frequency(int i) const { return i < points_ / 2 ? i : i - points_; }

    /// |k|^2 over the whole lattice, using k_even on every axis.
    const std::vector<double>& k_squared() const { return k_sq_; }
    /// |x| over the whole lattice.
    const std::vector<double>& radius() const { return radius_; }

    std::size_t stride(int axis) const { return strides_[axis]; }
    int axis_index(std::size_t flat, int axis) const
    {
        return static_cast<int>((flat / strides_[axis]) % static_cast<std::size_t>(points_));
    }

    /// True when the 2/3 rule keeps the mode at flat lattice index `flat`.
    bool dealias_keep(std::size_t flat) const;

    bool same_shape(const Grid& other) const;

private:
    Grid(int dim, int points_per_axis, double half_width);

    int dim_;
    int points_;
    double half_width_;
    double spacing_;
    double cell_volume_;
    std::size_t cells_;
    std::size_t strides_[3]{};
    std::vector<double> k_odd_;
    std::vector<double> k_even_;
    std::vector<double> k_sq_;
    std::vector<double> radius_;
};

/// Throws StructuralError unless the two grids describe the same box.
void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace bnls
