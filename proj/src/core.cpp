#include "newslens/core.hpp"

#include <openssl/evp.h>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace newslens {

namespace {

// Civil-calendar <-> day-number conversions (Hinnant's algorithms).
long long days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const long long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long long>(doe) - 719468;
}

void civil_from_days(long long z, int& y, int& m, int& d) {
    z += 719468;
    const long long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const long long yy = static_cast<long long>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

bool days_in_month_ok(int y, int m, int d) {
    static const int lens[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m < 1 || m > 12 || d < 1) return false;
    int len = lens[m - 1];
    bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    if (m == 2 && leap) len = 29;
    return d <= len;
}

bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    int v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

}  // namespace

std::optional<Date> Date::parse(std::string_view iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
    int y, m, d;
    if (!parse_int(iso.substr(0, 4), y) || !parse_int(iso.substr(5, 2), m) ||
        !parse_int(iso.substr(8, 2), d))
        return std::nullopt;
    if (!days_in_month_ok(y, m, d)) return std::nullopt;
    return Date{y, m, d};
}

Date Date::from_day_number(long long days) {
    Date out;
    civil_from_days(days, out.year, out.month, out.day);
    return out;
}

long long Date::day_number() const { return days_from_civil(year, month, day); }

Date Date::plus_days(long long n) const { return from_day_number(day_number() + n); }

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

long long operator-(const Date& a, const Date& b) {
    return a.day_number() - b.day_number();
}

std::optional<DateTime> DateTime::parse(std::string_view iso) {
    std::string_view datepart = iso.substr(0, std::min<size_t>(10, iso.size()));
    auto d = Date::parse(datepart);
    if (!d) return std::nullopt;
    DateTime out;
    out.date = *d;
    if (iso.size() == 10) return out;
    std::string_view rest = iso.substr(10);
    if (rest.front() != 'T' && rest.front() != ' ') return std::nullopt;
    rest.remove_prefix(1);
    if (!rest.empty() && rest.back() == 'Z') rest.remove_suffix(1);
    if (rest.size() != 8 || rest[2] != ':' || rest[5] != ':') return std::nullopt;
    int hh, mm, ss;
    if (!parse_int(rest.substr(0, 2), hh) || !parse_int(rest.substr(3, 2), mm) ||
        !parse_int(rest.substr(6, 2), ss))
        return std::nullopt;
    if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
    out.second_of_day = hh * 3600 + mm * 60 + ss;
    return out;
}

std::string DateTime::to_string() const {
    if (!second_of_day) return date.to_string();
    int s = *second_of_day;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%sT%02d:%02d:%02dZ", date.to_string().c_str(),
                  s / 3600, (s / 60) % 60, s % 60);
    return buf;
}

const char* side_name(Side s) {
    switch (s) {
        case Side::Palestine: return "Palestine";
        case Side::Israel: return "Israel";
        case Side::Both: return "Both";
        case Side::Other: return "Other";
    }
    return "Other";
}

std::optional<Side> parse_side(std::string_view s) {
    if (s == "Palestine") return Side::Palestine;
    if (s == "Israel") return Side::Israel;
    if (s == "Both") return Side::Both;
    if (s == "Other") return Side::Other;
    return std::nullopt;
}

namespace str {

std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_ws = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_ws = true;
        } else {
            if (in_ws && !out.empty()) out.push_back(' ');
            in_ws = false;
            out.push_back(c);
        }
    }
    return out;
}

std::string normalize_key(std::string_view s) { return lower(collapse_whitespace(trim(s))); }

std::vector<std::string> split(std::string_view s, char delim) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t pos = s.find(delim, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(s.substr(start));
            break;
        }
        out.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

bool icontains(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return true;
    if (needle.size() > haystack.size()) return false;
    std::string h = lower(haystack), n = lower(needle);
    return h.find(n) != std::string::npos;
}

std::vector<std::string> word_tokens(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur.push_back(c);
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

}  // namespace str

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hexd = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hexd[digest[i] >> 4]);
        out.push_back(hexd[digest[i] & 0xF]);
    }
    return out;
}

double round_half_up(double v, int decimals) {
    double p = std::pow(10.0, decimals);
    return std::copysign(std::floor(std::abs(v) * p + 0.5) / p, v);
}

std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, round_half_up(v, decimals));
    // normalize "-0.00" to "0.00"
    std::string s = buf;
    bool all_zero = true;
    for (char c : s)
        if (c >= '1' && c <= '9') all_zero = false;
    if (all_zero && !s.empty() && s[0] == '-') s.erase(0, 1);
    return s;
}

}  // namespace newslens
