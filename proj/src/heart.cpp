#include "newslens/heart.hpp"

#include "newslens/io.hpp"

namespace newslens::heart {

const char* metric_name(Metric m) {
    return m == Metric::Vividness ? "vividness" : "plot_volume";
}

std::optional<Metric> parse_metric(std::string_view s) {
    if (s == "vividness") return Metric::Vividness;
    if (s == "plot_volume") return Metric::PlotVolume;
    return std::nullopt;
}

ScoreLoadResult load_scores(const std::filesystem::path& path) {
    auto rows = io::read_tsv(path);
    ScoreLoadResult out;
    for (size_t i = 1; i < rows.size(); ++i) {  // row 0 is the header
        const auto& row = rows[i];
        if (row.size() != 4) {
            out.rejections.push_back({i + 1, "expected 4 columns"});
            continue;
        }
        auto metric = parse_metric(str::trim(row[2]));
        if (!metric) {
            out.rejections.push_back({i + 1, "unknown metric: " + row[2]});
            continue;
        }
        std::string rating_text = str::trim(row[3]);
        if (rating_text != "1" && rating_text != "2" && rating_text != "3") {
            out.rejections.push_back({i + 1, "rating out of range: " + row[3]});
            continue;
        }
        out.scores.push_back(
            {str::trim(row[0]), str::trim(row[1]), *metric, rating_text[0] - '0'});
    }
    return out;
}

ArticleDiff aggregate_article_metric(const std::string& article_id, const std::string& outlet,
                                     const Date& published_at, const std::vector<Score>& scores,
                                     Metric metric, const SideLookup& lookup) {
    ArticleDiff diff;
    diff.article_id = article_id;
    diff.outlet = outlet;
    diff.published_at = published_at;
    diff.metric = metric;
    for (const auto& s : scores) {
        if (s.metric != metric) continue;
        auto side = lookup(s.article_id, s.entity);
        if (!side || (*side != Side::Palestine && *side != Side::Israel))
            throw InputError("cannot resolve story side: " + s.article_id + " / " + s.entity);
        if (*side == Side::Palestine)
            diff.pal_sum += s.rating;
        else
            diff.isr_sum += s.rating;
    }
    return diff;
}

std::vector<ArticleDiff> aggregate_article(const std::string& article_id,
                                           const std::string& outlet, const Date& published_at,
                                           const std::vector<Score>& scores,
                                           const SideLookup& lookup) {
    bool has[2] = {false, false};
    for (const auto& s : scores) has[s.metric == Metric::PlotVolume ? 1 : 0] = true;
    std::vector<ArticleDiff> out;
    if (has[0])
        out.push_back(aggregate_article_metric(article_id, outlet, published_at, scores,
                                               Metric::Vividness, lookup));
    if (has[1])
        out.push_back(aggregate_article_metric(article_id, outlet, published_at, scores,
                                               Metric::PlotVolume, lookup));
    return out;
}

std::map<std::pair<std::string, Metric>, std::map<int, stats::MeanCount>> diff_series(
    const std::vector<ArticleDiff>& diffs, const corpus::StudyWindow& window) {
    std::map<std::pair<std::string, Metric>, std::vector<std::pair<Date, double>>> grouped;
    for (const auto& d : diffs)
        grouped[{d.outlet, d.metric}].emplace_back(d.published_at,
                                                   static_cast<double>(d.diff()));
    std::map<std::pair<std::string, Metric>, std::map<int, stats::MeanCount>> out;
    for (const auto& [key, values] : grouped)
        out[key] = stats::weekly_mean_series(values, window);
    return out;
}

}  // namespace newslens::heart
