#include "bnls/io/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "bnls/error.hpp"

namespace bnls::io {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

namespace {

template <typename T>
void put(unsigned char* buf, std::size_t offset, T v)
{
    std::memcpy(buf + offset, &v, sizeof(T));
}

template <typename T>
T get(const unsigned char* buf, std::size_t offset)
{
    T v;
    std::memcpy(&v, buf + offset, sizeof(T));
    return v;
}

std::string where(const std::filesystem::path& path)
{
    return " (" + path.string() + ")";
}

}  // namespace

void write_snapshot(const Field& f, const PhysicalParams& p, const std::filesystem::path& path)
{
    const Grid& g = f.grid();
    unsigned char header[kSnapshotHeaderBytes] = {};
    std::memcpy(header, "BNLS", 4);
    put<std::uint32_t>(header, 4, kSnapshotVersion);
    put<std::int64_t>(header, 8, g.dim());
    put<std::int64_t>(header, 16, g.points_per_axis());
    put<double>(header, 24, g.half_width());
    put<double>(header, 32, p.gamma);
    put<double>(header, 40, p.mu);
    put<double>(header, 48, p.omega);
    put<double>(header, 56, p.sigma);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open snapshot for writing" + where(path));
    out.write(reinterpret_cast<const char*>(header), sizeof header);
    // std::complex<double> is layout-compatible with double[2].
    out.write(reinterpret_cast<const char*>(f.values().data()),
              static_cast<std::streamsize>(f.size() * sizeof(cplx)));
    if (!out) throw IoError("failed writing snapshot" + where(path));
}

void write_snapshot(const Field& f, const std::filesystem::path& path)
{
    PhysicalParams p;
    p.dim = f.grid().dim();
    write_snapshot(f, p, path);
}

Snapshot read_snapshot_with_params(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open snapshot" + where(path));
    unsigned char header[kSnapshotHeaderBytes];
    in.read(reinterpret_cast<char*>(header), sizeof header);
    if (in.gcount() != static_cast<std::streamsize>(sizeof header)) {
        throw FormatError("snapshot header truncated" + where(path));
    }
    if (std::memcmp(header, "BNLS", 4) != 0) throw FormatError("snapshot magic mismatch" + where(path));
    const auto version = get<std::uint32_t>(header, 4);
    if (version != kSnapshotVersion) {
        throw FormatError("unsupported snapshot version " + std::to_string(version) + where(path));
    }
    const auto dim = get<std::int64_t>(header, 8);
    const auto points = get<std::int64_t>(header, 16);
    const double L = get<double>(header, 24);
    if (dim < 1 || dim > 3 || points < 4 || points > (1 << 16)) {
        throw FormatError("snapshot header has invalid grid shape" + where(path));
    }
    GridPtr grid;
    try {
        grid = Grid::create(static_cast<int>(dim), static_cast<int>(points), L);
    } catch (const Error& e) {
        throw FormatError(std::string("snapshot grid rejected: ") + e.what() + where(path));
    }
    PhysicalParams p;
    p.dim = static_cast<int>(dim);
    p.gamma = get<double>(header, 32);
    p.mu = get<double>(header, 40);
    p.omega = get<double>(header, 48);
    p.sigma = get<double>(header, 56);

    std::vector<cplx> values(grid->cell_count());
    const auto bytes = static_cast<std::streamsize>(values.size() * sizeof(cplx));
    in.read(reinterpret_cast<char*>(values.data()), bytes);
    if (in.gcount() != bytes) throw FormatError("snapshot payload truncated" + where(path));
    in.peek();
    if (!in.eof()) throw FormatError("snapshot has trailing bytes" + where(path));
    return Snapshot{Field(grid, std::move(values)), p};
}

Field read_snapshot(const std::filesystem::path& path)
{
    return read_snapshot_with_params(path).field;
}

}  // namespace bnls::io
