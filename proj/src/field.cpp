#include "bnls/field.hpp"

#include <algorithm>
#include <cmath>

#include "bnls/error.hpp"

namespace bnls {

Field::Field(GridPtr grid) : grid_(std::move(grid))
{
    if (!grid_) throw StructuralError("field constructed without a grid");
    values_.assign(grid_->cell_count(), cplx{0.0, 0.0});
}

Field::Field(GridPtr grid, std::vector<cplx> values)
    : grid_(std::move(grid)), values_(std::move(values))
{
    if (!grid_) throw StructuralError("field constructed without a grid");
    if (values_.size() != grid_->cell_count()) {
        throw StructuralError("field has " + std::to_string(values_.size()) +
                              " values but grid has " + std::to_string(grid_->cell_count()) +
                              " cells");
    }
}

Field Field::from_real(GridPtr grid, std::span<const double> values)
{
    std::vector<cplx> v(values.begin(), values.end());
    return Field(std::move(grid), std::move(v));
}

Field Field::from_radial(GridPtr grid, const RadialProfile& profile)
{
    const auto& r = grid->radius();
    std::vector<cplx> v(r.size());
    std::transform(r.begin(), r.end(), v.begin(), [&](double x) { return cplx{profile(x), 0.0}; });
    return Field(std::move(grid), std::move(v));
}

bool Field::is_finite() const
{
    return std::all_of(values_.begin(), values_.end(), [](const cplx& z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

void Field::require_finite(const char* what) const
{
    if (!is_finite()) throw PoisonedStateError(std::string(what) + ": field contains NaN or Inf");
}

double Field::max_abs() const
{
    double m = 0.0;
    for (const auto& z : values_) m = std::max(m, std::abs(z));
    return m;
}

double Field::boundary_max_abs() const
{
    double m = 0.0;
    const auto& g = *grid_;
    for (std::size_t idx = 0; idx < values_.size(); ++idx) {
        bool edge = false;
        for (int a = 0; a < g.dim(); ++a) edge = edge || g.axis_index(idx, a) == 0;
        if (edge) m = std::max(m, std::abs(values_[idx]));
    }
    return m;
}

Field Field::scaled(cplx factor) const
{
    std::vector<cplx> v(values_);
    for (auto& z : v) z *= factor;
    return Field(grid_, std::move(v));
}

std::vector<double> Field::real_part() const
{
    std::vector<double> out(values_.size());
    std::transform(values_.begin(), values_.end(), out.begin(), [](const cplx& z) { return z.real(); });
    return out;
}

std::vector<double> Field::abs_squared() const
{
    std::vector<double> out(values_.size());
    std::transform(values_.begin(), values_.end(), out.begin(), [](const cplx& z) { return std::norm(z); });
    return out;
}

double boundary_ratio(const Field& f)
{
    const double m = f.max_abs();
    return m > 0.0 ? f.boundary_max_abs() / m : 0.0;
}

}  // namespace bnls
