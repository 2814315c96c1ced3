#pragma once

#include <memory>
#include <span>
#include <vector>

#include "bnls/field.hpp"

namespace bnls {

/// Fourier coefficients of a Field. Forward transform is unscaled:
///   F_k = sum_j f_j exp(-i k x_j)  (up to the constant phase of the box origin),
/// the inverse divides by cell_count().
struct SpectralField {
    GridPtr grid;
    std::vector<cplx> coeffs;
};

/// Owns an FFTW plan pair for one lattice shape. Holds scratch space, so an
/// instance must not be used by two threads at once; see transform_for().
class SpectralTransform {
public:
    SpectralTransform(int dim, int points_per_axis);
    ~SpectralTransform();
    SpectralTransform(const SpectralTransform&) = delete;
    SpectralTransform& operator=(const SpectralTransform&) = delete;

    SpectralField forward(const Field& f);
    Field inverse(const SpectralField& F);

    /// In-place variants on raw lattice arrays of length cell_count().
    void forward_inplace(std::span<cplx> data);
    /// Includes the 1/cell_count normalization.
    void inverse_inplace(std::span<cplx> data);

    std::size_t cell_count() const { return cells_; }

private:
    void check_size(std::size_t n) const;

    std::size_t cells_;
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Thread-local cached transform for the grid's lattice shape.
SpectralTransform& transform_for(const Grid& grid);

/// Per-mode weights w(k) over the wavenumber lattice.
class SpectralMultiplier {
public:
    SpectralMultiplier(GridPtr grid, std::vector<cplx> weights);

    static SpectralMultiplier identity(GridPtr grid);
    /// -|k|^2
    static SpectralMultiplier laplacian(GridPtr grid);
    /// |k|^4
    static SpectralMultiplier bilaplacian(GridPtr grid);

    Field apply(const Field& f) const;
    void apply_inplace(std::span<cplx> coeffs) const;

    const std::vector<cplx>& weights() const { return weights_; }

private:
    GridPtr grid_;
    std::vector<cplx> weights_;
};

Field forward_roundtrip(const Field& f);

Field laplacian(const Field& f);
Field bilaplacian(const Field& f);
/// Spectral partial derivative along `axis` (Nyquist mode dropped).
Field partial(const Field& f, int axis);

/// Lattice quadrature h^dim * sum(values).
double integrate(const Grid& grid, std::span<const double> values);
cplx integrate(const Grid& grid, std::span<const cplx> values);
/// integrate() applied to the real part of a field.
double integrate(const Field& f);

/// Physical-space integral of sum_k w(k) |F_k|^2, i.e. (2L)^dim / cells^2 * sum w |F|^2.
/// With w == 1 this equals integrate(|f|^2) by Parseval.
double spectral_quadratic(const Grid& grid, std::span<const cplx> coeffs,
                          std::span<const double> weight);
double spectral_quadratic(const Grid& grid, std::span<const cplx> coeffs);

}  // namespace bnls
