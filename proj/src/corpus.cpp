#include "newslens/corpus.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "newslens/io.hpp"

using json = nlohmann::json;

namespace newslens::corpus {

const char* kind_name(ArticleKind k) {
    switch (k) {
        case ArticleKind::News: return "news";
        case ArticleKind::Transcript: return "transcript";
        case ArticleKind::LiveFeed: return "live_feed";
        case ArticleKind::Summary: return "summary";
        case ArticleKind::Other: return "other";
    }
    return "other";
}

std::optional<ArticleKind> parse_kind(std::string_view s) {
    if (s == "news") return ArticleKind::News;
    if (s == "transcript") return ArticleKind::Transcript;
    if (s == "live_feed") return ArticleKind::LiveFeed;
    if (s == "summary") return ArticleKind::Summary;
    if (s == "other") return ArticleKind::Other;
    return std::nullopt;
}

namespace {

const char* kRequiredFields[] = {"id", "outlet", "published_at", "title", "body", "tags", "kind"};

std::optional<std::string> parse_article_line(const std::string& line, Article& out) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return "not a JSON object";
    for (const char* f : kRequiredFields)
        if (!j.contains(f)) return std::string("missing field: ") + f;
    for (const char* f : {"id", "outlet", "published_at", "title", "body", "kind"})
        if (!j[f].is_string()) return std::string("field must be a string: ") + f;
    out.id = j["id"].get<std::string>();
    if (out.id.empty()) return "empty id";
    out.outlet = j["outlet"].get<std::string>();
    auto dt = DateTime::parse(j["published_at"].get<std::string>());
    if (!dt) return "bad published_at: " + j["published_at"].get<std::string>();
    out.published_at = *dt;
    out.title = j["title"].get<std::string>();
    out.body = j["body"].get<std::string>();
    if (out.body.empty()) return "empty body";
    if (!j["tags"].is_array()) return "field must be an array: tags";
    out.tags.clear();
    for (const auto& t : j["tags"]) {
        if (!t.is_string()) return "tags must be strings";
        out.tags.insert(t.get<std::string>());
    }
    auto kind = parse_kind(j["kind"].get<std::string>());
    if (!kind) return "unknown kind: " + j["kind"].get<std::string>();
    out.kind = *kind;
    return std::nullopt;
}

}  // namespace

LoadResult load_corpus(const std::filesystem::path& path, const std::string& schema_version) {
    if (schema_version != kCorpusSchemaVersion)
        throw ConfigError("unsupported corpus schema version: " + schema_version);
    std::string text = io::read_file(path);

    LoadResult result;
    std::set<std::string> seen_ids;
    size_t line_no = 0;
    size_t start = 0;
    while (start < text.size()) {
        size_t nl = text.find('\n', start);
        std::string line =
            text.substr(start, (nl == std::string::npos ? text.size() : nl) - start);
        start = (nl == std::string::npos) ? text.size() : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (str::trim(line).empty()) continue;
        Article a;
        if (auto err = parse_article_line(line, a)) {
            result.rejections.push_back({line_no, *err});
            continue;
        }
        if (!seen_ids.insert(a.id).second) {
            result.rejections.push_back({line_no, "duplicate id: " + a.id});
            continue;
        }
        result.articles.push_back(std::move(a));
    }
    return result;
}

std::string serialize_article(const Article& a) {
    json j;
    j["id"] = a.id;
    j["outlet"] = a.outlet;
    j["published_at"] = a.published_at.to_string();
    j["title"] = a.title;
    j["body"] = a.body;
    j["tags"] = a.tags;  // std::set keeps this sorted and deterministic
    j["kind"] = kind_name(a.kind);
    return j.dump();
}

void write_corpus(const std::filesystem::path& path, const std::vector<Article>& articles) {
    std::string out;
    for (const auto& a : articles) {
        out += serialize_article(a);
        out.push_back('\n');
    }
    io::write_file_atomic(path, out);
}

FilterRules FilterRules::defaults() {
    FilterRules r;
    r.tag_whitelist = {"Hamas", "Israel", "Gaza", "West Bank", "Palestin."};
    r.excluded_kinds = {ArticleKind::Transcript, ArticleKind::LiveFeed, ArticleKind::Summary,
                        ArticleKind::Other};
    r.title_terms = {"Hamas", "Israel", "Gaza", "West Bank", "IDF", "Palestine"};
    r.title_filtered_outlets = {"BBC"};
    return r;
}

bool tag_matches(const std::string& tag, const std::vector<std::string>& whitelist) {
    auto tag_tokens = str::word_tokens(str::lower(tag));
    for (const auto& entry : whitelist) {
        bool prefix = !entry.empty() && entry.back() == '.';
        std::string needle = prefix ? entry.substr(0, entry.size() - 1) : entry;
        auto entry_tokens = str::word_tokens(str::lower(needle));
        if (entry_tokens.empty() || entry_tokens.size() > tag_tokens.size()) continue;
        for (size_t i = 0; i + entry_tokens.size() <= tag_tokens.size(); ++i) {
            bool ok = true;
            for (size_t k = 0; k < entry_tokens.size(); ++k) {
                const std::string& want = entry_tokens[k];
                const std::string& have = tag_tokens[i + k];
                bool last = (k + 1 == entry_tokens.size());
                if (prefix && last) {
                    ok = have.size() >= want.size() && have.compare(0, want.size(), want) == 0;
                } else {
                    ok = have == want;
                }
                if (!ok) break;
            }
            if (ok) return true;
        }
    }
    return false;
}

std::vector<Article> filter_articles(const std::vector<Article>& articles,
                                     const FilterRules& rules) {
    if (rules.tag_whitelist.empty() && rules.title_terms.empty())
        throw ConfigError("filter rules are empty");
    std::vector<Article> out;
    for (const auto& a : articles) {
        if (a.kind != ArticleKind::News) continue;
        bool keep = false;
        for (const auto& tag : a.tags) {
            if (tag_matches(tag, rules.tag_whitelist)) {
                keep = true;
                break;
            }
        }
        if (!keep && rules.title_filtered_outlets.count(a.outlet)) {
            for (const auto& term : rules.title_terms) {
                if (str::icontains(a.title, term)) {
                    keep = true;
                    break;
                }
            }
        }
        if (keep) out.push_back(a);
    }
    return out;
}

StudyWindow StudyWindow::defaults() {
    StudyWindow w;
    w.start = *Date::parse("2023-10-07");
    w.end = *Date::parse("2024-10-07");
    w.week_anchor = w.start;
    return w;
}

WeeklyCounts weekly_counts(const std::vector<Article>& articles, const StudyWindow& window) {
    WeeklyCounts out;
    out.num_weeks = window.num_weeks();
    for (const auto& a : articles) {
        const Date& d = a.published_at.date;
        if (!window.contains(d))
            throw InputError("article outside study window: " + a.id + " (" + d.to_string() +
                             ")");
        auto& series = out.by_outlet[a.outlet];
        if (series.empty()) series.assign(out.num_weeks, 0);
        series[window.week_index(d)] += 1;
    }
    return out;
}

EventCatalog EventCatalog::load(const std::filesystem::path& path, const StudyWindow& window) {
    auto rows = io::read_tsv(path);
    if (rows.empty()) throw InputError("empty event catalog: " + path.string());
    // header: date, description, side
    EventCatalog cat;
    for (size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != 3)
            throw InputError("event catalog row " + std::to_string(i + 1) +
                             ": expected 3 columns");
        auto date = Date::parse(str::trim(row[0]));
        if (!date)
            throw InputError("event catalog row " + std::to_string(i + 1) + ": bad date " +
                             row[0]);
        auto side = parse_side(str::trim(row[2]));
        if (!side)
            throw InputError("event catalog row " + std::to_string(i + 1) + ": bad side " +
                             row[2]);
        if (!window.contains(*date))
            throw InputError("event outside study window: " + date->to_string());
        cat.events.push_back({*date, str::trim(row[1]), *side});
    }
    std::stable_sort(cat.events.begin(), cat.events.end(),
                     [](const Event& a, const Event& b) { return a.date < b.date; });
    return cat;
}

EventCatalog EventCatalog::restricted_to(Side side) const {
    EventCatalog out;
    for (const auto& e : events)
        if (e.side == side) out.events.push_back(e);
    return out;
}

CasualtySeries CasualtySeries::load_weekly(const std::filesystem::path& path,
                                           const StudyWindow& window) {
    auto rows = io::read_tsv(path);
    if (rows.empty()) throw InputError("empty casualty series: " + path.string());
    CasualtySeries s;
    int weeks = window.num_weeks();
    s.deaths_palestine.assign(weeks, 0);
    s.deaths_israel.assign(weeks, 0);
    s.injured_palestine.assign(weeks, 0);
    s.injured_israel.assign(weeks, 0);
    std::vector<bool> seen(weeks, false);
    for (size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != 5)
            throw InputError("casualty series row " + std::to_string(i + 1) +
                             ": expected 5 columns");
        int w = std::stoi(row[0]);
        if (w < 0 || w >= weeks)
            throw InputError("casualty series week_index out of range: " + row[0]);
        long long vals[4];
        for (int k = 0; k < 4; ++k) {
            vals[k] = std::stoll(row[k + 1]);
            if (vals[k] < 0) throw InputError("casualty counts must be >= 0");
        }
        s.deaths_palestine[w] = vals[0];
        s.deaths_israel[w] = vals[1];
        s.injured_palestine[w] = vals[2];
        s.injured_israel[w] = vals[3];
        seen[w] = true;
    }
    for (int w = 0; w < weeks; ++w)
        if (!seen[w])
            throw InputError("casualty series week_index not contiguous: missing week " +
                             std::to_string(w));
    return s;
}

void CasualtySeries::load_daily(const std::filesystem::path& path, const StudyWindow& window) {
    auto rows = io::read_tsv(path);
    for (size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != 3)
            throw InputError("daily deaths row " + std::to_string(i + 1) +
                             ": expected 3 columns");
        auto date = Date::parse(str::trim(row[0]));
        if (!date) throw InputError("daily deaths: bad date " + row[0]);
        if (!window.contains(*date))
            throw InputError("daily deaths date outside window: " + date->to_string());
        daily_deaths[*date] = {std::stoll(row[1]), std::stoll(row[2])};
    }
}

std::vector<Date> select_analysis_dates(const EventCatalog& catalog, const StudyWindow& window,
                                        const DateSelectionParams& params) {
    const Date lo = window.start.plus_days(params.exclusion_head_days);
    const Date hi = window.end.plus_days(-params.exclusion_tail_days);

    std::vector<Date> admissible;
    for (const auto& e : catalog.events) {
        if (e.date < lo || hi < e.date) continue;
        if (admissible.empty() || admissible.back() != e.date) admissible.push_back(e.date);
    }
    const int k = params.k;
    if (static_cast<int>(admissible.size()) < k)
        throw InputError("date selection needs " + std::to_string(k) +
                         " admissible events, found " + std::to_string(admissible.size()));
    if (static_cast<int>(admissible.size()) == k) return admissible;

    const double ideal = static_cast<double>(hi - lo) / (k - 1);
    std::vector<Date> picks{admissible.front()};
    for (int slot = 1; slot < k; ++slot) {
        // Equidistant ladder target anchored at the first pick; candidates
        // must additionally keep their gap from the previous pick within
        // tolerance when any such candidate exists.
        const double target = static_cast<double>(picks.front().day_number()) + slot * ideal;
        const Date& prev = picks.back();
        const Date* best = nullptr;
        double best_dist = 0.0;
        bool best_in_tol = false;
        for (const auto& d : admissible) {
            if (!(prev < d)) continue;
            long long gap = d - prev;
            bool in_tol =
                gap >= params.tolerance_min_days && gap <= params.tolerance_max_days;
            double dist = std::abs(static_cast<double>(d.day_number()) - target);
            bool better;
            if (!best) {
                better = true;
            } else if (in_tol != best_in_tol) {
                better = in_tol;  // in-tolerance candidates dominate
            } else {
                better = dist < best_dist;  // ties keep the earlier date
            }
            if (better) {
                best = &d;
                best_dist = dist;
                best_in_tol = in_tol;
            }
        }
        if (!best)
            throw InputError("date selection ran out of admissible events at slot " +
                             std::to_string(slot + 1));
        picks.push_back(*best);
    }
    return picks;
}

}  // namespace newslens::corpus
