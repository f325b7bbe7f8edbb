// Command-line front end: curve validation, orbit tracing, classification
// scans and rigidity-bound reports, with reproducible (byte-identical)
// outputs for identical configurations.

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "billiards/curve_io.hpp"

namespace {

using namespace billiards;

constexpr double kPi = std::numbers::pi;
constexpr int kExitInvalidCurve = 2;
constexpr int kExitPropagation = 3;
constexpr int kExitModeMismatch = 4;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CurveFileError("cannot open curve file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Options {
    std::string curve_path;
    std::string chart = "phi";
    std::string genfun = "S";
    std::string region = "full";
    std::string grid = "64x64";
    std::string theorem = "1.3";
    std::string out;       // empty = stdout
    std::string scan_out;  // bounds: optional per-cell CSV
    std::string start = "0,0.5";
    int steps = 10;
    int horizon = 24;
    double tol_def = 1e-9;
    double collar = 1e-3;
    unsigned long long seed = 0;
    int spot_check = 0;

    GenFun genfun_enum() const { return genfun == "L" ? GenFun::L : GenFun::S; }

    void parse_grid(int& w, int& h) const {
        const auto x = grid.find('x');
        if (x == std::string::npos)
            throw CLI::ValidationError("--grid", "expected WxH");
        w = std::stoi(grid.substr(0, x));
        h = std::stoi(grid.substr(x + 1));
        if (w < 8 || h < 8)
            throw CLI::ValidationError("--grid", "resolutions must be >= 8");
    }

    std::string canonical(const std::string& command,
                          const std::string& curve_bytes) const {
        std::ostringstream ss;
        ss << "command=" << command << ";curve=" << config_hash_hex(curve_bytes)
           << ";chart=" << chart << ";genfun=" << genfun << ";region=" << region
           << ";grid=" << grid << ";theorem=" << theorem << ";start=" << start
           << ";steps=" << steps << ";horizon=" << horizon
           << ";tol=" << g17(tol_def) << ";collar=" << g17(collar)
           << ";seed=" << seed << ";spot=" << spot_check;
        return ss.str();
    }
};

std::ostream& open_out(const Options& opt, std::unique_ptr<std::ofstream>& holder) {
    if (opt.out.empty() || opt.out == "-") return std::cout;
    holder = std::make_unique<std::ofstream>(opt.out);
    if (!*holder) throw std::runtime_error("cannot write output file: " + opt.out);
    return *holder;
}

SupportCurve load_curve(const CurveFile& file) {
    return file.kind == SeriesKind::Height ? SupportCurve::from_h(file.series)
                                           : SupportCurve::from_h2(file.series);
}

/// Class-C view of a curve, if it has one: support_h2 input directly, or a
/// support_h whose exact square satisfies the frequency condition.
std::optional<ClassCCurve> classc_view(const CurveFile& file) {
    TrigSeries h2 = file.kind == SeriesKind::HeightSquared
                        ? file.series
                        : file.series.product(file.series);
    const double tol = 1e-10 * (std::abs(h2.constant_coeff()) + 1.0);
    if (!classc_frequencies_ok(h2, tol)) return std::nullopt;
    try {
        return ClassCCurve::build(h2.pruned(tol));
    } catch (const CurveValidationError&) {
        return std::nullopt;
    }
}

int cmd_curve_check(const Options& opt) {
    const std::string bytes = slurp(opt.curve_path);
    const CurveFile file = read_curve_file(opt.curve_path);
    const SupportCurve curve = load_curve(file);
    const auto classc = classc_view(file);

    double h_min = 1e300, h_max = -1e300;
    for (int i = 0; i < 4096; ++i) {
        const double h = curve.h(2.0 * kPi * i / 4096, 0);
        h_min = std::min(h_min, h);
        h_max = std::max(h_max, h);
    }

    std::unique_ptr<std::ofstream> holder;
    std::ostream& out = open_out(opt, holder);
    const std::string hash = config_hash_hex(opt.canonical("curve-check", bytes));
    out << manifest_line("curve-check", hash) << "\n";
    out << "kind "
        << (file.kind == SeriesKind::Height ? "support_h" : "support_h2") << "\n";
    out << "max_degree " << file.series.max_degree() << "\n";
    out << "h_min " << g17(h_min) << "\n";
    out << "h_max " << g17(h_max) << "\n";
    out << "rho_min " << g17(curve.min_rho()) << "\n";
    out << "rho_max " << g17(curve.max_rho()) << "\n";
    out << "beta " << g17(curve.min_curvature()) << "\n";
    out << "length " << g17(curve.length()) << "\n";
    out << "diameter " << g17(curve.diameter()) << "\n";
    out << "blaschke_bound " << g17(2.0 / curve.min_curvature()) << "\n";
    out << "class_c " << (classc ? "yes" : "no") << "\n";
    if (classc) out << "R " << g17(classc->R()) << "\n";
    return 0;
}

int cmd_orbit(const Options& opt) {
    const std::string bytes = slurp(opt.curve_path);
    const CurveFile file = read_curve_file(opt.curve_path);
    const SupportCurve curve = load_curve(file);

    double a = 0.0, b = 0.0;
    if (std::sscanf(opt.start.c_str(), "%lf,%lf", &a, &b) != 2)
        throw CLI::ValidationError("--start", "expected two comma-separated reals");
    const PhasePoint z0 = opt.chart == "s" ? PhasePoint{Chart::SCos, a, b}
                                           : PhasePoint{Chart::PhiP, a, b};

    std::unique_ptr<std::ofstream> holder;
    std::ostream& out = open_out(opt, holder);
    const std::string hash = config_hash_hex(opt.canonical("orbit", bytes));
    out << manifest_line("orbit", hash) << "\n";
    out << "step,phi,p,s,cos_delta,psi,delta,L,S\n";

    PhasePoint z = opt.chart == "s" ? to_phiP(curve, z0) : z0;
    if (z.r >= curve.h(z.q, 0) || z.r <= -curve.h(z.q + kPi, 0)) {
        std::cerr << "orbit: start line does not meet the table\n";
        return kExitPropagation;
    }
    const double phi_start = z.q, p_start = z.r;
    int period = 0;
    double period_defect = 0.0;
    for (int n = 0; n < opt.steps; ++n) {
        const PhasePoint zs = to_sCos(curve, z);
        const MapResult next = map_phi(curve, z);
        if (next.status == StepStatus::Collar) {
            // grazing chord: trace ends, classification reports the verdict
            out << "# collar step=" << n << "\n";
            break;
        }
        if (next.status != StepStatus::Ok) {
            out << "# propagation_failure step=" << n << "\n";
            std::cerr << "orbit: propagation failed at step " << n << "\n";
            return kExitPropagation;
        }
        const double psi = 0.5 * (z.q + next.point.q);
        const double delta = 0.5 * (next.point.q - z.q);
        // chord of this line: from its outgoing bounce to the next bounce
        const Vec2 p_from = curve.point(curve.psi_from_arclength(zs.q));
        const Vec2 p_to = curve.point(psi);
        out << n << ',' << g17(z.q) << ',' << g17(z.r) << ',' << g17(zs.q) << ','
            << g17(zs.r) << ',' << g17(psi) << ',' << g17(delta) << ','
            << g17(norm(p_to - p_from)) << ',' << g17(gen_S(curve, z.q, next.point.q))
            << "\n";
        z = next.point;
        if (period == 0) {
            const double dphi = std::remainder(z.q - phi_start, 2.0 * kPi);
            const double defect = std::hypot(dphi, z.r - p_start);
            if (defect < 1e-9) {
                period = n + 1;
                period_defect = defect;
            }
        }
    }

    const Classification cl =
        classify(curve, z0, opt.genfun_enum(), opt.horizon,
                 {opt.tol_def, kDeltaMin});
    out << "# classification verdict=" << to_string(cl.verdict)
        << " margin=" << g17(cl.margin);
    if (cl.verdict == Verdict::NotM)
        out << " witness_len=" << cl.witness_len
            << " witness_start=" << cl.witness_start;
    out << "\n";
    if (period > 0)
        out << "# periodic period=" << period << " defect=" << g17(period_defect)
            << "\n";
    return 0;
}

ScanParams make_params(const Options& opt) {
    ScanParams params;
    opt.parse_grid(params.grid_w, params.grid_h);
    if (opt.horizon < 2)
        throw CLI::ValidationError("--horizon", "must be >= 2");
    if (opt.tol_def <= 0 || opt.collar <= 0)
        throw CLI::ValidationError("--tol-def/--collar", "must be positive");
    params.horizon = opt.horizon;
    params.genfun = opt.genfun_enum();
    params.region = opt.region == "A" ? Region::AboveAlpha : Region::Full;
    params.collar = opt.collar;
    params.tol = opt.tol_def;
    return params;
}

void spot_check(const Options& opt, const SupportCurve& curve,
                const ScanResult& scan, std::ostream& log) {
    if (opt.spot_check <= 0) return;
    std::mt19937_64 rng(opt.seed);
    std::vector<int> classified;
    for (int i = 0; i < static_cast<int>(scan.cells.size()); ++i)
        if (scan.cells[i].verdict == CellVerdict::NotM) classified.push_back(i);
    if (classified.empty()) {
        log << "# spot_check no not_m cells\n";
        return;
    }
    int stable = 0, checked = 0;
    for (int k = 0; k < opt.spot_check; ++k) {
        const auto& cell =
            scan.cells[classified[rng() % classified.size()]];
        const double h = curve.h(cell.psi, 0), hp = curve.h(cell.psi, 1);
        const PhasePoint z{Chart::PhiP, cell.psi + cell.delta,
                           h * std::cos(cell.delta) + hp * std::sin(cell.delta)};
        const Classification cl =
            classify(curve, z, scan.params.genfun, scan.params.horizon + 8,
                     {scan.params.tol, kDeltaMin});
        ++checked;
        if (cl.verdict == Verdict::NotM) ++stable;
    }
    log << "# spot_check not_m_stable " << stable << "/" << checked << "\n";
}

int cmd_scan(const Options& opt) {
    const std::string bytes = slurp(opt.curve_path);
    const CurveFile file = read_curve_file(opt.curve_path);
    const SupportCurve curve = load_curve(file);
    std::optional<ClassCCurve> classc;
    if (opt.region == "A") {
        classc = classc_view(file);
        if (!classc) {
            std::cerr << "scan: region A requires a class-C curve\n";
            return kExitModeMismatch;
        }
    }
    const ScanParams params = make_params(opt);
    const ScanResult scan =
        estimate_delta_measure(curve, classc ? &*classc : nullptr, params);

    std::unique_ptr<std::ofstream> holder;
    std::ostream& out = open_out(opt, holder);
    const std::string hash = config_hash_hex(opt.canonical("scan", bytes));
    write_scan_csv(out, scan, curve, hash);
    out << "# total_measure " << g17(scan.total) << "\n";
    out << "# mu_delta_estimate " << g17(scan.estimate()) << "\n";
    out << "# error_band " << g17(scan.band()) << "\n";
    out << "# mass_m_candidate " << g17(scan.mass_mcand) << "\n";
    spot_check(opt, curve, scan, out);
    return 0;
}

int cmd_bounds(const Options& opt) {
    const std::string bytes = slurp(opt.curve_path);
    const CurveFile file = read_curve_file(opt.curve_path);
    const SupportCurve curve = load_curve(file);
    ScanParams params = make_params(opt);
    const std::string hash = config_hash_hex(opt.canonical("bounds", bytes));

    BoundReport report;
    std::optional<ClassCCurve> classc;
    if (opt.theorem == "1.4") {
        classc = classc_view(file);
        if (!classc) {
            std::cerr << "bounds: theorem 1.4 requires a class-C curve\n";
            return kExitModeMismatch;
        }
        report = bound_report_thm14(*classc, params);
    } else if (opt.theorem == "1.3") {
        report = bound_report_thm13(curve, params);
    } else {
        throw CLI::ValidationError("--theorem", "must be 1.3 or 1.4");
    }

    std::unique_ptr<std::ofstream> holder;
    std::ostream& out = open_out(opt, holder);
    write_bound_report(out, report, hash);
    if (classc) {
        const auto fp = verify_4periodic(*classc, 256);
        out << "four_periodic_defect " << g17(fp.max_defect) << "\n";
        const auto fun = thm14_functional(*classc);
        out << "functional_lhs " << g17(fun.lhs) << "\n";
        out << "functional_rhs " << g17(fun.rhs) << "\n";
        out << "functional_rel_discrepancy " << g17(fun.rel_discrepancy) << "\n";
    }
    if (!opt.scan_out.empty()) {
        std::ofstream csv(opt.scan_out);
        if (!csv) throw std::runtime_error("cannot write " + opt.scan_out);
        write_scan_csv(csv, report.scan, curve, hash);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Convex billiards: m-orbit classification and rigidity bounds"};
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&opt](CLI::App* cmd, bool needs_curve = true) {
        cmd->add_option("--curve", opt.curve_path, "curve file")
            ->required(needs_curve);
        cmd->add_option("--out", opt.out, "output path (default stdout)");
    };

    CLI::App* check = app.add_subcommand("curve-check", "validate a curve file");
    add_common(check);

    CLI::App* orbit = app.add_subcommand("orbit", "trace and classify an orbit");
    add_common(orbit);
    orbit->add_option("--start", opt.start, "start point 'a,b' in the chart");
    orbit->add_option("--chart", opt.chart, "phi | s")
        ->check(CLI::IsMember({"phi", "s"}));
    orbit->add_option("--steps", opt.steps, "number of map steps")
        ->check(CLI::PositiveNumber);
    orbit->add_option("--genfun", opt.genfun, "S | L")
        ->check(CLI::IsMember({"S", "L"}));
    orbit->add_option("--horizon", opt.horizon, "classification horizon")
        ->check(CLI::Range(2, 1 << 20));

    CLI::App* scan = app.add_subcommand("scan", "classification scan of a grid");
    add_common(scan);
    scan->add_option("--genfun", opt.genfun)->check(CLI::IsMember({"S", "L"}));
    scan->add_option("--grid", opt.grid, "WxH cells");
    scan->add_option("--horizon", opt.horizon)->check(CLI::Range(2, 1 << 20));
    scan->add_option("--region", opt.region)->check(CLI::IsMember({"full", "A"}));
    scan->add_option("--collar", opt.collar, "excluded delta collar");
    scan->add_option("--tol-def", opt.tol_def, "definiteness tolerance");
    scan->add_option("--seed", opt.seed, "seed for spot checks");
    scan->add_option("--spot-check", opt.spot_check,
                     "re-verify K random not_m cells at a deeper horizon");

    CLI::App* bounds = app.add_subcommand("bounds", "theorem bound report");
    add_common(bounds);
    bounds->add_option("--theorem", opt.theorem)->check(CLI::IsMember({"1.3", "1.4"}));
    bounds->add_option("--genfun", opt.genfun)->check(CLI::IsMember({"S", "L"}));
    bounds->add_option("--grid", opt.grid);
    bounds->add_option("--horizon", opt.horizon)->check(CLI::Range(2, 1 << 20));
    bounds->add_option("--collar", opt.collar);
    bounds->add_option("--tol-def", opt.tol_def);
    bounds->add_option("--scan-out", opt.scan_out, "also write the per-cell CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return cmd_curve_check(opt);
        if (orbit->parsed()) return cmd_orbit(opt);
        if (scan->parsed()) return cmd_scan(opt);
        if (bounds->parsed()) return cmd_bounds(opt);
    } catch (const CurveFileError& e) {
        std::cerr << "invalid curve: " << e.what() << "\n";
        return kExitInvalidCurve;
    } catch (const CurveValidationError& e) {
        std::cerr << "invalid curve: " << e.what() << "\n";
        return kExitInvalidCurve;
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
