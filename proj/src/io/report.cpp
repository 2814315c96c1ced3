#include "bnls/io/report.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <memory>

#include "bnls/error.hpp"

#ifndef BNLS_VERSION
#define BNLS_VERSION "0.0.0"
#endif

namespace bnls::io {

namespace {

// JSON has no NaN/Inf; emit null for them.
json num(double x)
{
    return std::isfinite(x) ? json(x) : json(nullptr);
}

}  // namespace

std::string tool_version()
{
    return BNLS_VERSION;
}

json to_json(const PhysicalParams& p)
{
    return json{{"gamma", p.gamma},
                {"mu", p.mu},
                {"omega", p.omega},
                {"sigma", p.sigma},
                {"dim", p.dim},
                {"regime", to_string(p.regime())},
                {"instability_class", to_string(p.instability_class())},
                {"classification", p.describe()}};
}

json to_json(const FunctionalReport& r)
{
    return json{{"mass", num(r.mass)},         {"grad_norm_sq", num(r.grad_norm_sq)},
                {"lap_norm_sq", num(r.lap_norm_sq)}, {"potential", num(r.potential)},
                {"action", num(r.action)},     {"energy0", num(r.energy0)},
                {"nehari", num(r.nehari)},     {"pohozaev", num(r.pohozaev)},
                {"virial", num(r.virial)}};
}

json to_json(const IdentityDefects& d)
{
    return json{{"nehari", num(d.nehari)}, {"pohozaev", num(d.pohozaev)}, {"virial", num(d.virial)}};
}

json to_json(const GroundStateResult& r, const Certificate& c)
{
    const Grid& g = r.profile.grid();
    return json{
        {"grid", {{"dim", g.dim()}, {"points", g.points_per_axis()}, {"half_width", g.half_width()}}},
        {"converged", r.converged},
        {"iterations", r.iterations},
        {"residual", num(r.residual)},
        {"report", to_json(r.report)},
        {"boundary_ratio", num(boundary_ratio(r.profile))},
        {"certificate",
         {{"accepted", c.accepted},
          {"identity_defects", to_json(c.defects)},
          {"identity_tolerance", c.identity_tolerance},
          {"energy0", num(c.energy0)},
          {"energy0_decomposition", num(c.energy0_decomposition)},
          {"decomposition_residual", num(c.decomposition_residual)},
          {"exceptional_case", c.exceptional_case},
          {"energy0_sign_applicable", c.energy0_sign_applicable},
          {"energy0_sign_ok", c.energy0_sign_ok},
          {"radial_symmetry_defect", num(c.radial_symmetry_defect)},
          {"ground_state_energy_estimate", num(c.ground_state_energy_estimate)},
          {"notes", c.notes}}}};
}

json to_json(const TrajectoryOutcome& t)
{
    return json{{"verdict", to_string(t.verdict)},
                {"reason", t.reason},
                {"t_final", num(t.t_final)},
                {"samples", t.samples.size()},
                {"conservation_defects",
                 {{"mass_rel", num(t.conservation_defects.mass_rel)},
                  {"energy_rel", num(t.conservation_defects.energy_rel)}}},
                {"blowup_threshold", t.blowup_threshold},
                {"dt_underflow_factor", t.dt_underflow_factor},
                {"initial_lap_norm", num(t.initial_lap_norm)},
                {"final_lap_growth", num(t.final_lap_growth)},
                {"min_dt", num(t.min_dt)},
                {"accepted_steps", t.accepted_steps},
                {"rejected_steps", t.rejected_steps},
                {"notes", t.notes}};
}

json to_json(const RateComparison& c)
{
    json rows = json::array();
    for (const auto& r : c.rows) {
        json row{{"R", r.R},
                 {"max_abs_defect", num(r.max_abs_defect)},
                 {"max_signed_defect", num(r.max_signed_defect)},
                 {"max_abs_defect_fd", num(r.max_abs_defect_fd)},
                 {"slack_max", num(r.slack_max)},
                 {"violations", r.violations},
                 {"compared", r.compared}};
        if (r.best_eta > 0.0) row["best_eta"] = r.best_eta;
        rows.push_back(row);
    }
    return json{{"slack_constant", num(c.slack_constant)},
                {"calibration", c.calibration},
                {"rows", rows},
                {"defect_decreasing", c.defect_decreasing},
                {"slack_decreasing", c.slack_decreasing},
                {"inequality_holds", c.inequality_holds},
                {"resolved_lap_limit", num(c.resolved_lap_limit)},
                {"excluded_unresolved", c.excluded_unresolved}};
}

json to_json(const InstabilityExperiment& e)
{
    const auto& i = e.initial;
    const auto& s = e.persistence;
    return json{
        {"preset", e.preset},
        {"params", to_json(e.config.params)},
        {"lambda", e.config.lambda},
        {"perturbation", to_string(e.config.perturbation)},
        {"radii", e.config.radii},
        {"expected", to_string(e.expected)},
        {"status", e.status},
        {"ground_state", to_json(e.ground_state, e.certificate)},
        {"initial_signs",
         {{"action_v", num(i.action_v)},
          {"action_u", num(i.action_u)},
          {"virial_v", num(i.virial_v)},
          {"nehari_v", num(i.nehari_v)},
          {"action_below", i.action_below},
          {"virial_negative", i.virial_negative},
          {"nehari_negative", i.nehari_negative}}},
        {"trajectory", to_json(e.trajectory)},
        {"sign_persistence",
         {{"holds", s.holds()},
          {"max_virial", num(s.max_virial)},
          {"max_nehari", num(s.max_nehari)},
          {"virial_violations", s.virial_violations},
          {"nehari_violations", s.nehari_violations}}},
        {"q_gap_measured", num(e.q_gap_measured)},
        {"gap",
         {{"measured", num(e.gap.measured)},
          {"bound", num(e.gap.bound)},
          {"tolerance", num(e.gap.tolerance)},
          {"consistent", e.gap.consistent},
          {"caveat", e.gap.caveat}}},
        {"dichotomy",
         {{"quantity", e.dichotomy.quantity},
          {"threshold", num(e.dichotomy.threshold)},
          {"below", e.dichotomy.below},
          {"above", e.dichotomy.above}}},
        {"virial_comparison", to_json(e.virial_comparison)},
        {"notes", e.notes}};
}

json to_json(const PropositionReport& r, bool with_samples)
{
    json j{{"d_proxy", num(r.d_proxy)},
           {"tolerance", num(r.tolerance)},
           {"drawn", r.drawn},
           {"kept", r.kept},
           {"violations", r.violations},
           {"min_kept_action", num(r.min_kept_action)},
           {"inconclusive", r.inconclusive},
           {"caveat", r.caveat}};
    if (with_samples) {
        json samples = json::array();
        for (const auto& s : r.samples) {
            samples.push_back({{"index", s.index},
                               {"amplitude", num(s.amplitude)},
                               {"lambda0", num(s.lambda0)},
                               {"action", num(s.action)},
                               {"nehari", num(s.nehari)},
                               {"kept", s.kept},
                               {"violation", s.violation}});
        }
        j["samples"] = samples;
    }
    return j;
}

void write_json(const json& j, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing (" + path.string() + ")");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing (" + path.string() + ")");
}

namespace {

struct MdCtxDeleter {
    void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new())
    {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
            throw Error("sha256: digest initialisation failed");
        }
    }
    void update(const void* data, std::size_t n)
    {
        if (EVP_DigestUpdate(ctx_.get(), data, n) != 1) throw Error("sha256: update failed");
    }
    std::string hex()
    {
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        if (EVP_DigestFinal_ex(ctx_.get(), md, &len) != 1) throw Error("sha256: finalisation failed");
        static const char* digits = "0123456789abcdef";
        std::string out;
        for (unsigned int i = 0; i < len; ++i) {
            out += digits[md[i] >> 4];
            out += digits[md[i] & 15];
        }
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx_;
};

}  // namespace

std::string sha256_hex(std::string_view bytes)
{
    Sha256 h;
    h.update(bytes.data(), bytes.size());
    return h.hex();
}

std::string sha256_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read for digest (" + path.string() + ")");
    Sha256 h;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        if (in.gcount() > 0) h.update(buf, static_cast<std::size_t>(in.gcount()));
    }
    return h.hex();
}

RunManifest make_manifest(const RunConfig& rc)
{
    RunManifest m;
    m.tool_version = tool_version();
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    m.timestamp = buf;
    m.command = rc.command;
    m.config = rc.resolved;
    for (const auto& p : {rc.initial.snapshot, rc.input_snapshot}) {
        if (p) m.input_digests.emplace_back(p->string(), sha256_file(*p));
    }
    return m;
}

json to_json(const RunManifest& m)
{
    json digests = json::object();
    for (const auto& [path, hex] : m.input_digests) digests[path] = hex;
    return json{{"tool_version", m.tool_version},
                {"timestamp", m.timestamp},
                {"command", m.command},
                {"config", m.config},
                {"input_digests", digests},
                {"outputs", m.outputs}};
}

}  // namespace bnls::io
