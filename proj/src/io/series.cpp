#include "bnls/io/series.hpp"

#include <cstdio>
#include <fstream>

#include "bnls/error.hpp"

namespace bnls::io {

std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::string radius_label(double r)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", r);
    return buf;
}

void append_column(std::string& line, const std::vector<double>& v, std::size_t j)
{
    line += ',';
    if (j < v.size()) line += format_double(v[j]);
}

}  // namespace

std::string series_header(const std::vector<double>& radii)
{
    std::string h = "t,mass,grad_norm_sq,lap_norm_sq,potential,action,energy0,nehari,pohozaev,virial_Q";
    for (const char* prefix : {"M_R", "dMdt_R", "rate_R"}) {
        for (double r : radii) h += std::string(",") + prefix + radius_label(r);
    }
    return h;
}

std::string format_series(const std::vector<DiagnosticsRecord>& records,
                          const std::vector<double>& radii)
{
    std::string out = series_header(radii) + '\n';
    for (const auto& rec : records) {
        const auto& r = rec.report;
        std::string line = format_double(rec.t);
        for (double x : {r.mass, r.grad_norm_sq, r.lap_norm_sq, r.potential, r.action, r.energy0,
                         r.nehari, r.pohozaev, r.virial}) {
            line += ',';
            line += format_double(x);
        }
        for (std::size_t j = 0; j < radii.size(); ++j) append_column(line, rec.virial_M, j);
        for (std::size_t j = 0; j < radii.size(); ++j) append_column(line, rec.virial_rate_fd, j);
        for (std::size_t j = 0; j < radii.size(); ++j) append_column(line, rec.virial_rate, j);
        out += line;
        out += '\n';
    }
    return out;
}

void write_series(const std::vector<DiagnosticsRecord>& records, const std::vector<double>& radii,
                  const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open series for writing (" + path.string() + ")");
    out << format_series(records, radii);
    if (!out) throw IoError("failed writing series (" + path.string() + ")");
}

}  // namespace bnls::io
