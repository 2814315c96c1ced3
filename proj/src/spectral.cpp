#include "bnls/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <utility>

#include "bnls/error.hpp"

namespace bnls {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

}  // namespace

struct SpectralTransform::Impl {
    fftw_complex* buffer = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

SpectralTransform::SpectralTransform(int dim, int points_per_axis)
    : cells_(1), impl_(std::make_unique<Impl>())
{
    int n[3];
    for (int a = 0; a < dim; ++a) {
        n[a] = points_per_axis;
        cells_ *= static_cast<std::size_t>(points_per_axis);
    }
    std::lock_guard lock(planner_mutex());
    impl_->buffer = fftw_alloc_complex(cells_);
    // FFTW_ESTIMATE keeps plan selection deterministic from run to run.
    impl_->forward = fftw_plan_dft(dim, n, impl_->buffer, impl_->buffer, FFTW_FORWARD, FFTW_ESTIMATE);
    impl_->backward = fftw_plan_dft(dim, n, impl_->buffer, impl_->buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!impl_->forward || !impl_->backward) throw Error("FFTW plan creation failed");
}

SpectralTransform::~SpectralTransform()
{
    std::lock_guard lock(planner_mutex());
    if (impl_->forward) fftw_destroy_plan(impl_->forward);
    if (impl_->backward) fftw_destroy_plan(impl_->backward);
    if (impl_->buffer) fftw_free(impl_->buffer);
}

void SpectralTransform::check_size(std::size_t n) const
{
    if (n != cells_) {
        throw StructuralError("transform of size " + std::to_string(cells_) + " applied to " +
                              std::to_string(n) + " values");
    }
}

void SpectralTransform::forward_inplace(std::span<cplx> data)
{
    check_size(data.size());
    auto* buf = reinterpret_cast<cplx*>(impl_->buffer);
    std::copy(data.begin(), data.end(), buf);
    fftw_execute(impl_->forward);
    std::copy(buf, buf + cells_, data.begin());
}

void SpectralTransform::inverse_inplace(std::span<cplx> data)
{
    check_size(data.size());
    auto* buf = reinterpret_cast<cplx*>(impl_->buffer);
    std::copy(data.begin(), data.end(), buf);
    fftw_execute(impl_->backward);
    const double scale = 1.0 / static_cast<double>(cells_);
    for (std::size_t i = 0; i < cells_; ++i) data[i] = buf[i] * scale;
}

SpectralField SpectralTransform::forward(const Field& f)
{
    SpectralField out{f.grid_ptr(), std::vector<cplx>(f.values().begin(), f.values().end())};
    forward_inplace(out.coeffs);
    return out;
}

Field SpectralTransform::inverse(const SpectralField& F)
{
    if (!F.grid) throw StructuralError("spectral field without grid");
    if (F.coeffs.size() != F.grid->cell_count()) {
        throw StructuralError("spectral field size does not match its grid");
    }
    std::vector<cplx> v(F.coeffs);
    inverse_inplace(v);
    return Field(F.grid, std::move(v));
}

SpectralTransform& transform_for(const Grid& grid)
{
    thread_local std::map<std::pair<int, int>, std::unique_ptr<SpectralTransform>> cache;
    auto key = std::make_pair(grid.dim(), grid.points_per_axis());
    auto it = cache.find(key);
    if (it == cache.end()) {
        it = cache.emplace(key, std::make_unique<SpectralTransform>(grid.dim(), grid.points_per_axis()))
                 .first;
    }
    return *it->second;
}

SpectralMultiplier::SpectralMultiplier(GridPtr grid, std::vector<cplx> weights)
    : grid_(std::move(grid)), weights_(std::move(weights))
{
    if (weights_.size() != grid_->cell_count()) {
        throw StructuralError("multiplier size does not match grid");
    }
}

SpectralMultiplier SpectralMultiplier::identity(GridPtr grid)
{
    std::vector<cplx> w(grid->cell_count(), cplx{1.0, 0.0});
    return {std::move(grid), std::move(w)};
}

SpectralMultiplier SpectralMultiplier::laplacian(GridPtr grid)
{
    const auto& k2 = grid->k_squared();
    std::vector<cplx> w(k2.size());
    std::transform(k2.begin(), k2.end(), w.begin(), [](double k) { return cplx{-k, 0.0}; });
    return {std::move(grid), std::move(w)};
}

SpectralMultiplier SpectralMultiplier::bilaplacian(GridPtr grid)
{
    const auto& k2 = grid->k_squared();
    std::vector<cplx> w(k2.size());
    std::transform(k2.begin(), k2.end(), w.begin(), [](double k) { return cplx{k * k, 0.0}; });
    return {std::move(grid), std::move(w)};
}

void SpectralMultiplier::apply_inplace(std::span<cplx> coeffs) const
{
    if (coeffs.size() != weights_.size()) throw StructuralError("multiplier applied to wrong size");
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] *= weights_[i];
}

Field SpectralMultiplier::apply(const Field& f) const
{
    require_same_grid(*grid_, f.grid(), "SpectralMultiplier::apply");
    auto& tr = transform_for(f.grid());
    std::vector<cplx> v(f.values().begin(), f.values().end());
    tr.forward_inplace(v);
    apply_inplace(v);
    tr.inverse_inplace(v);
    return Field(f.grid_ptr(), std::move(v));
}

Field forward_roundtrip(const Field& f)
{
    auto& tr = transform_for(f.grid());
    return tr.inverse(tr.forward(f));
}

namespace {

template <class Symbol>
Field apply_symbol(const Field& f, Symbol symbol)
{
    auto& tr = transform_for(f.grid());
    std::vector<cplx> v(f.values().begin(), f.values().end());
    tr.forward_inplace(v);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= symbol(i);
    tr.inverse_inplace(v);
    return Field(f.grid_ptr(), std::move(v));
}

}  // namespace

Field laplacian(const Field& f)
{
    const auto& k2 = f.grid().k_squared();
    return apply_symbol(f, [&](std::size_t i) { return -k2[i]; });
}

Field bilaplacian(const Field& f)
{
    const auto& k2 = f.grid().k_squared();
    return apply_symbol(f, [&](std::size_t i) { return k2[i] * k2[i]; });
}

Field partial(const Field& f, int axis)
{
    const auto& g = f.grid();
    if (axis < 0 || axis >= g.dim()) throw StructuralError("partial: axis out of range");
    return apply_symbol(f, [&](std::size_t i) { return cplx{0.0, g.k_odd(g.axis_index(i, axis))}; });
}

double integrate(const Grid& grid, std::span<const double> values)
{
    if (values.size() != grid.cell_count()) throw StructuralError("integrate: size mismatch");
    double s = 0.0;
    for (double v : values) s += v;
    return s * grid.cell_volume();
}

cplx integrate(const Grid& grid, std::span<const cplx> values)
{
    if (values.size() != grid.cell_count()) throw StructuralError("integrate: size mismatch");
    cplx s{0.0, 0.0};
    for (const auto& v : values) s += v;
    return s * grid.cell_volume();
}

double integrate(const Field& f)
{
    double s = 0.0;
    for (const auto& v : f.values()) s += v.real();
    return s * f.grid().cell_volume();
}

double spectral_quadratic(const Grid& grid, std::span<const cplx> coeffs, std::span<const double> weight)
{
    if (coeffs.size() != grid.cell_count() || weight.size() != coeffs.size()) {
        throw StructuralError("spectral_quadratic: size mismatch");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) s += weight[i] * std::norm(coeffs[i]);
    const double n = static_cast<double>(grid.cell_count());
    return s * grid.cell_volume() / n;
}

double spectral_quadratic(const Grid& grid, std::span<const cplx> coeffs)
{
    if (coeffs.size() != grid.cell_count()) throw StructuralError("spectral_quadratic: size mismatch");
    double s = 0.0;
    for (const auto& c : coeffs) s += std::norm(c);
    return s * grid.cell_volume() / static_cast<double>(grid.cell_count());
}

}  // namespace bnls
