#ifndef BILLIARDS_CURVE_IO_HPP
#define BILLIARDS_CURVE_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <string>

#include "billiards/measure.hpp"
#include "billiards/support_curve.hpp"

namespace billiards {

inline constexpr const char* kVersion = "0.1.0";

class CurveFileError : public std::runtime_error {
public:
    explicit CurveFileError(const std::string& what)
        : std::runtime_error(what) {}
};

/// Parsed curve file: the series plus how to read it.
///
/// Grammar (line based, '#' starts a comment):
///   kind support_h | support_h2
///   term <n> <cos_coeff> <sin_coeff>
/// Frequencies must be unique non-negative integers, coefficients finite
/// reals. support_h2 files declare class-C input and are held to the
/// class-C frequency condition at load time.
struct CurveFile {
    SeriesKind kind = SeriesKind::Height;
    TrigSeries series;
};

CurveFile parse_curve_file(std::istream& in);
CurveFile read_curve_file(const std::string& path);
void write_curve_file(const std::string& path, const CurveFile& file);

/// 17-significant-digit formatting used for all numeric output, so repeated
/// runs are byte-identical.
std::string g17(double v);

/// FNV-1a 64-bit over the canonical config string.
std::uint64_t fnv1a64(const std::string& s);
std::string config_hash_hex(const std::string& canonical);

/// First line of every output file.
std::string manifest_line(const std::string& command, const std::string& hash);

void write_scan_csv(std::ostream& out, const ScanResult& scan,
                    const SupportCurve& curve, const std::string& hash);
void write_bound_report(std::ostream& out, const BoundReport& report,
                        const std::string& hash);

}  // namespace billiards

#endif
