#ifndef NEWSLENS_CORE_HPP
#define NEWSLENS_CORE_HPP

#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace newslens {

// Configuration problems (bad config file, bad rule set, unbound placeholder).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad or missing input data (unreadable file, record outside the study window).
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Service call failed after all retry attempts.
struct TransportError : std::runtime_error {
    int last_status;
    TransportError(const std::string& msg, int status)
        : std::runtime_error(msg), last_status(status) {}
};

// Service answered, but the payload did not carry a usable message.
struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Calendar date (UTC). All series in the pipeline are anchored on dates, so
// this stays a plain value type with day-level arithmetic.
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    static std::optional<Date> parse(std::string_view iso);  // "YYYY-MM-DD"
    static Date from_day_number(long long days);             // days since 1970-01-01

    long long day_number() const;
    Date plus_days(long long n) const;
    std::string to_string() const;

    friend auto operator<=>(const Date&, const Date&) = default;
};

// Difference in days.
long long operator-(const Date& a, const Date& b);

// Date plus optional time of day, seconds resolution. Parsing accepts
// "YYYY-MM-DD" or "YYYY-MM-DDTHH:MM:SS" with an optional trailing "Z".
struct DateTime {
    Date date;
    std::optional<int> second_of_day;

    static std::optional<DateTime> parse(std::string_view iso);
    std::string to_string() const;

    friend auto operator<=>(const DateTime&, const DateTime&) = default;
};

// Side of the conflict an entity is associated with.
enum class Side { Palestine, Israel, Both, Other };

const char* side_name(Side s);
std::optional<Side> parse_side(std::string_view s);

namespace str {

std::string trim(std::string_view s);
std::string lower(std::string_view s);  // ASCII case fold
std::string collapse_whitespace(std::string_view s);
// trim + collapse internal whitespace + case fold; the record-identity
// normalization used for entity matching and deduplication.
std::string normalize_key(std::string_view s);
std::vector<std::string> split(std::string_view s, char delim);
bool icontains(std::string_view haystack, std::string_view needle);
// Maximal runs of alphanumeric characters.
std::vector<std::string> word_tokens(std::string_view s);

}  // namespace str

std::string sha256_hex(std::string_view data);

// Round half away from zero at `decimals` places. Reporting-layer rounding:
// internal computations keep full precision.
double round_half_up(double v, int decimals);
std::string format_fixed(double v, int decimals);

}  // namespace newslens

#endif  // NEWSLENS_CORE_HPP
