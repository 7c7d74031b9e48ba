#ifndef NEWSLENS_HEART_HPP
#define NEWSLENS_HEART_HPP

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "newslens/core.hpp"
#include "newslens/stats.hpp"

namespace newslens::heart {

enum class Metric { Vividness, PlotVolume };

const char* metric_name(Metric m);
std::optional<Metric> parse_metric(std::string_view s);

// One 1-3 rating of a story (article + entity) on one narrative metric.
struct Score {
    std::string article_id;
    std::string entity;
    Metric metric = Metric::Vividness;
    int rating = 1;
};

struct ScoreRejection {
    size_t line_number = 0;
    std::string reason;
};

struct ScoreLoadResult {
    std::vector<Score> scores;
    std::vector<ScoreRejection> rejections;
};

// TSV with header (article_id, entity, metric, rating). Ratings outside
// {1, 2, 3} are rejected, never clamped.
ScoreLoadResult load_scores(const std::filesystem::path& path);

struct ArticleDiff {
    std::string article_id;
    std::string outlet;
    Date published_at;
    Metric metric = Metric::Vividness;
    long long pal_sum = 0;
    long long isr_sum = 0;
    long long diff() const { return pal_sum - isr_sum; }
};

// Resolves a story to its side; stories the pipeline does not know, or whose
// side is not Palestine/Israel, come back empty.
using SideLookup =
    std::function<std::optional<Side>(const std::string& article_id, const std::string& entity)>;

// Side-wise rating sums for one article and one metric. Throws InputError
// naming the story when a score's side cannot be resolved.
ArticleDiff aggregate_article_metric(const std::string& article_id, const std::string& outlet,
                                     const Date& published_at, const std::vector<Score>& scores,
                                     Metric metric, const SideLookup& lookup);

// One ArticleDiff per metric present in `scores`.
std::vector<ArticleDiff> aggregate_article(const std::string& article_id,
                                           const std::string& outlet, const Date& published_at,
                                           const std::vector<Score>& scores,
                                           const SideLookup& lookup);

// Weekly mean difference per (outlet, metric); weeks without articles absent.
std::map<std::pair<std::string, Metric>, std::map<int, stats::MeanCount>> diff_series(
    const std::vector<ArticleDiff>& diffs, const corpus::StudyWindow& window);

}  // namespace newslens::heart

#endif  // NEWSLENS_HEART_HPP
