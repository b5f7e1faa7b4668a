#pragma once

#include "whitney/averaging.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace whitney {

/// alpha_order value of rows that take the sup over every order <= m.
inline constexpr int kAllOrders = -1;

struct ReportRow {
    std::size_t n = 0;
    int m = 0;
    double t = 0.0;
    std::string op;             ///< classical | averaged | restriction
    int alpha_order = kAllOrders;
    std::string probe_kind;     ///< interior | corner | approach | pairs | all
    double sup_value = 0.0;
    double fitted_exponent = std::numeric_limits<double>::quiet_NaN();
    std::size_t samples = 1;    ///< N
    std::uint64_t seed = 0;
    double runtime = 0.0;       ///< seconds; written only when the report records runtimes

    friend bool operator==(const ReportRow&, const ReportRow&);
};

/// Rows plus free-form header lines. The CSV form starts with the header lines
/// prefixed by "# ", then a column line, then one line per row.
class ExperimentReport {
public:
    std::vector<std::string> notes;
    std::vector<ReportRow> rows;
    bool include_runtime = false;

    void write_csv(std::ostream& out) const;
    std::string to_csv() const;
    static ExperimentReport read_csv(std::istream& in);
    static ExperimentReport from_csv(const std::string& text);

    /// Rows of one curve, in row order.
    std::vector<ReportRow> series(const std::string& op, const std::string& probe_kind, int alpha_order) const;
    /// Fitted exponent of one curve; throws if the curve is missing.
    double exponent(const std::string& op, const std::string& probe_kind, int alpha_order) const;

    /// One two-column (n, sup_value) file per curve, named
    /// <prefix>_<op>_<kind>_<order>.dat. Returns the paths written.
    std::vector<std::string> write_gnuplot(const std::string& directory, const std::string& prefix) const;
};

/// Least-squares slope of log(y) against log(x). Needs two distinct x and y > 0.
double fit_loglog_slope(std::span<const double> xs, std::span<const double> ys);

enum class FieldFamily { adversarial, random, both, constant };

FieldFamily parse_field_family(const std::string& name);

struct NormGrowthConfig {
    std::size_t n_min = 1;
    std::size_t n_max = 6;
    int m = 1;
    FieldFamily family = FieldFamily::both;
    std::size_t probes = 16;     ///< per probe kind and field
    std::size_t samples = 512;   ///< N of the averaged operator
    std::uint64_t seed = 7;
    unsigned jobs = 1;
    bool record_runtime = false;
};

/// Probe suprema of |d^alpha F| for the classical operator (t = 1/8, origin 0)
/// and the averaged operator (default averaged t, common random numbers) on
/// interior and corner probes, with a log-log slope per curve.
ExperimentReport norm_growth_study(const NormGrowthConfig& cfg);

struct RestrictionConfig {
    std::string function = "sines";  ///< SmoothTestFunction::parse spec
    int m = 1;
    std::size_t n_min = 1;
    std::size_t n_max = 6;
    std::size_t points = 12;         ///< |E| per random set
    std::size_t sets = 3;            ///< random sets per n; the row keeps the max
    std::uint64_t seed = 7;
    unsigned jobs = 1;
    bool record_runtime = false;
};

/// cm_norm of restrict_function(F) on random E in [0,1]^n, with fitted exponent.
ExperimentReport restriction_norm_study(const RestrictionConfig& cfg);

// Gates shared by the verify suites and the acceptance driver.
inline constexpr double kPartitionTolerance = 1e-10;
inline constexpr double kFirstOrderFdTolerance = 1e-6;
inline constexpr double kHighOrderFdTolerance = 1e-4;
inline constexpr double kApproachSlack = 0.2;
inline constexpr double kPeriodicityTolerance = 1e-12;
inline constexpr double kInterchangeRelative = 1e-5;
inline constexpr double kSigmaAllowance = 3.0;
inline constexpr double kGrowthSlack = 0.5;
inline constexpr double kRestrictionSlack = 0.3;

struct CheckResult {
    std::string suite;
    std::string name;
    int criterion = 0;          ///< acceptance criterion gated by this check, 0 if none
    bool passed = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
    double seconds = 0.0;

    std::string id() const { return suite + "." + name; }
};

struct VerifyConfig {
    std::optional<std::size_t> n;    ///< narrows every dimension sweep to this n
    std::optional<int> m;            ///< narrows every degree sweep to this m
    std::uint64_t seed = 7;
    std::size_t samples = 4096;      ///< N of the Monte Carlo checks
    std::size_t growth_samples = 512;
    std::size_t growth_n_max = 6;
    unsigned jobs = 1;
};

struct SuiteResult {
    std::vector<CheckResult> checks;

    bool passed() const;
    /// Criterion mapping header, then one line per check.
    void write(std::ostream& out) const;
};

/// Names accepted by verify_suite, "all" last.
const std::vector<std::string>& suite_names();

/// (criterion, suite.check) for every acceptance gate.
std::vector<std::pair<int, std::string>> criterion_map();

/// Runs the named suite; "all" runs every suite in order. Throws on an unknown name.
SuiteResult verify_suite(const std::string& name, const VerifyConfig& cfg);

/// Runs one check by its "suite.name" id.
CheckResult run_check(const std::string& id, const VerifyConfig& cfg);

} // namespace whitney
