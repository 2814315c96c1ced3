#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "bnls/grid.hpp"

namespace bnls {

using cplx = std::complex<double>;

/// Radial profile r -> f(r).
using RadialProfile = std::function<double(double)>;

/// Complex state sampled on a Grid. A Field is a value: it is never
/// modified after construction, every operation returns a new one.
class Field {
public:
    /// Zero field.
    explicit Field(GridPtr grid);
    /// Throws StructuralError when values.size() != grid->cell_count().
    Field(GridPtr grid, std::vector<cplx> values);

    static Field from_real(GridPtr grid, std::span<const double> values);
    /// Samples f(|x|) at every lattice point.
    static Field from_radial(GridPtr grid, const RadialProfile& profile);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::span<const cplx> values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    const cplx& operator[](std::size_t i) const { return values_[i]; }

    bool is_finite() const;
    /// Throws PoisonedStateError if any entry is NaN/Inf.
    void require_finite(const char* what) const;

    double max_abs() const;
    /// max |f| on the outermost shell of lattice points (any axis index 0).
    double boundary_max_abs() const;

    Field scaled(cplx factor) const;
    std::vector<double> real_part() const;
    std::vector<double> abs_squared() const;

private:
    GridPtr grid_;
    std::vector<cplx> values_;
};

/// Relative boundary amplitude max_boundary|f| / max|f| (0 for the zero field).
double boundary_ratio(const Field& f);

/// Boundary ratio above which fields are considered not to fit their box.
inline constexpr double kBoundaryWarnRatio = 1e-10;

}  // namespace bnls
