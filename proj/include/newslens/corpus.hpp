#ifndef NEWSLENS_CORPUS_HPP
#define NEWSLENS_CORPUS_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "newslens/core.hpp"

namespace newslens::corpus {

enum class ArticleKind { News, Transcript, LiveFeed, Summary, Other };

const char* kind_name(ArticleKind k);
std::optional<ArticleKind> parse_kind(std::string_view s);

struct Article {
    std::string id;
    std::string outlet;  // "AJE", "BBC", "CNN", "NYT", extensible
    DateTime published_at;
    std::string title;
    std::string body;
    std::set<std::string> tags;
    ArticleKind kind = ArticleKind::Other;
};

struct Rejection {
    size_t line_number = 0;
    std::string reason;
};

struct LoadResult {
    std::vector<Article> articles;
    std::vector<Rejection> rejections;
};

inline constexpr const char* kCorpusSchemaVersion = "1";

// Line-delimited JSON, one article per line, fields exactly
// {id, outlet, published_at, title, body, tags, kind}. Malformed lines are
// skipped and reported; an unreadable file throws InputError.
LoadResult load_corpus(const std::filesystem::path& path, const std::string& schema_version);

std::string serialize_article(const Article& a);
void write_corpus(const std::filesystem::path& path, const std::vector<Article>& articles);

struct FilterRules {
    // A whitelist entry matches a tag when the entry's tokens appear as a
    // consecutive token run inside the tag, case-insensitively. An entry with
    // a trailing '.' matches its last token as a prefix ("Palestin." covers
    // Palestine/Palestinian/Palestinians).
    std::vector<std::string> tag_whitelist;
    std::set<ArticleKind> excluded_kinds;
    std::vector<std::string> title_terms;  // substring match, case-insensitive
    std::set<std::string> title_filtered_outlets;

    static FilterRules defaults();
};

bool tag_matches(const std::string& tag, const std::vector<std::string>& whitelist);

// Keeps an article iff kind == news and (a tag matches the whitelist, or the
// outlet is title-filtered and the title contains a title term). Order
// preserving; throws ConfigError on an empty rule set.
std::vector<Article> filter_articles(const std::vector<Article>& articles,
                                     const FilterRules& rules);

struct StudyWindow {
    Date start;
    Date end;          // inclusive
    Date week_anchor;  // == start; week 0 covers [start, start+6]

    static StudyWindow defaults();  // 2023-10-07 .. 2024-10-07

    bool contains(const Date& d) const { return start <= d && d <= end; }
    int week_index(const Date& d) const { return static_cast<int>((d - start) / 7); }
    int num_weeks() const { return static_cast<int>((end - start) / 7) + 1; }
};

struct WeeklyCounts {
    int num_weeks = 0;
    std::map<std::string, std::vector<long long>> by_outlet;  // zero-filled
};

// Throws InputError naming the article id when one falls outside the window.
WeeklyCounts weekly_counts(const std::vector<Article>& articles, const StudyWindow& window);

struct Event {
    Date date;
    std::string description;
    Side side = Side::Other;
};

struct EventCatalog {
    std::vector<Event> events;  // sorted ascending by date

    // TSV with header (date, description, side). Dates must fall inside the
    // window; rows are sorted on load.
    static EventCatalog load(const std::filesystem::path& path, const StudyWindow& window);

    EventCatalog restricted_to(Side side) const;
};

struct CasualtySeries {
    // Weekly, index aligned with StudyWindow weeks.
    std::vector<long long> deaths_palestine;
    std::vector<long long> deaths_israel;
    std::vector<long long> injured_palestine;
    std::vector<long long> injured_israel;
    // Daily deaths (for the lagged correlation analysis), optional.
    std::map<Date, std::pair<long long, long long>> daily_deaths;  // (P, I)

    // TSV with header (week_index, deaths_p, deaths_i, injured_p, injured_i).
    static CasualtySeries load_weekly(const std::filesystem::path& path,
                                      const StudyWindow& window);
    // TSV with header (date, deaths_p, deaths_i); merged into daily_deaths.
    void load_daily(const std::filesystem::path& path, const StudyWindow& window);
};

struct DateSelectionParams {
    // The paper's analytic window ran Dec 1 2023 through Sep 11 2024; these
    // day counts realize its "two months after the start / one month before
    // the anniversary" exclusions against the actual selected dates.
    long long exclusion_head_days = 55;
    long long exclusion_tail_days = 26;
    int k = 4;
    long long tolerance_min_days = 90;
    long long tolerance_max_days = 100;
};

// Deterministic selection of k event dates spread across the admissible
// window: the first pick is the earliest admissible event; each later slot
// takes the event closest to the equidistant ladder target whose gap from the
// previous pick lies within tolerance (ties -> earlier date). Throws
// InputError listing the admissible count when fewer than k dates qualify.
std::vector<Date> select_analysis_dates(const EventCatalog& catalog, const StudyWindow& window,
                                        const DateSelectionParams& params);

}  // namespace newslens::corpus

#endif  // NEWSLENS_CORPUS_HPP
