#include "billiards/curve_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace billiards {

CurveFile parse_curve_file(std::istream& in) {
    std::string line;
    int lineno = 0;
    bool have_kind = false;
    SeriesKind kind = SeriesKind::Height;
    std::vector<TrigTerm> terms;

    auto fail = [&lineno](const std::string& msg) {
        throw CurveFileError("curve file line " + std::to_string(lineno) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;  // blank
        if (key == "kind") {
            std::string value;
            if (!(ls >> value)) fail("missing kind value");
            if (value == "support_h") kind = SeriesKind::Height;
            else if (value == "support_h2") kind = SeriesKind::HeightSquared;
            else fail("unknown kind '" + value + "'");
            have_kind = true;
        } else if (key == "term") {
            long long n;
            double c, s;
            if (!(ls >> n >> c >> s)) fail("term needs: n cos_coeff sin_coeff");
            if (n < 0) fail("negative frequency");
            if (!std::isfinite(c) || !std::isfinite(s)) fail("non-finite coefficient");
            for (const auto& t : terms)
                if (t.n == n) fail("duplicate frequency " + std::to_string(n));
            std::string extra;
            if (ls >> extra) fail("trailing tokens after term");
            terms.push_back({static_cast<int>(n), c, s});
        } else {
            fail("unknown directive '" + key + "'");
        }
    }
    if (!have_kind) { lineno = 0; fail("missing 'kind' directive"); }
    if (terms.empty()) { lineno = 0; fail("no terms"); }

    CurveFile out;
    out.kind = kind;
    out.series = TrigSeries(std::move(terms));
    if (kind == SeriesKind::HeightSquared && !classc_frequencies_ok(out.series))
        throw CurveFileError(
            "class-C frequency violation: support_h2 frequencies must lie in {0} u (2+4Z)");
    return out;
}

CurveFile read_curve_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CurveFileError("cannot open curve file: " + path);
    return parse_curve_file(in);
}

void write_curve_file(const std::string& path, const CurveFile& file) {
    std::ofstream out(path);
    if (!out) throw CurveFileError("cannot write curve file: " + path);
    out << "kind "
        << (file.kind == SeriesKind::Height ? "support_h" : "support_h2") << "\n";
    for (const auto& t : file.series.terms())
        out << "term " << t.n << " " << g17(t.cos_coeff) << " "
            << g17(t.sin_coeff) << "\n";
}

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string config_hash_hex(const std::string& canonical) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical)));
    return buf;
}

std::string manifest_line(const std::string& command, const std::string& hash) {
    return "# billiards " + std::string(kVersion) + " command=" + command +
           " config=" + hash;
}

void write_scan_csv(std::ostream& out, const ScanResult& scan,
                    const SupportCurve& curve, const std::string& hash) {
    out << manifest_line("scan", hash) << "\n";
    out << "psi,delta,phi,p,verdict,witness_len,margin,weight\n";
    for (const ScanCell& c : scan.cells) {
        const double h = curve.h(c.psi, 0), hp = curve.h(c.psi, 1);
        const double phi = c.psi + c.delta;
        const double p = h * std::cos(c.delta) + hp * std::sin(c.delta);
        out << g17(c.psi) << ',' << g17(c.delta) << ',' << g17(phi) << ','
            << g17(p) << ',' << to_string(c.verdict) << ',' << c.witness_len
            << ',' << g17(c.margin) << ',' << g17(c.weight) << "\n";
    }
}

void write_bound_report(std::ostream& out, const BoundReport& report,
                        const std::string& hash) {
    out << manifest_line("bounds", hash) << "\n";
    out << "theorem " << report.theorem << "\n";
    out << "beta " << g17(report.beta) << "\n";
    out << "d2 " << g17(report.d2) << "\n";
    out << "rhs " << g17(report.rhs) << "\n";
    out << "mu_delta_estimate " << g17(report.estimate) << "\n";
    out << "error_band " << g17(report.band) << "\n";
    out << "region_measure " << g17(report.total) << "\n";
    out << "grid " << report.params.grid_w << "x" << report.params.grid_h << "\n";
    out << "horizon " << report.params.horizon << "\n";
    out << "genfun " << (report.params.genfun == GenFun::S ? "S" : "L") << "\n";
    out << "region "
        << (report.params.region == Region::Full ? "full" : "A") << "\n";
    out << "verdict "
        << (!report.consistent ? "violation"
                               : (report.sharp ? "sharp" : "consistent"))
        << "\n";
}

}  // namespace billiards
