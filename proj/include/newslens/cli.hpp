#ifndef NEWSLENS_CLI_HPP
#define NEWSLENS_CLI_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "newslens/baseline.hpp"
#include "newslens/corpus.hpp"
#include "newslens/extraction.hpp"
#include "newslens/instances.hpp"

namespace newslens::cli {

inline constexpr const char* kToolVersion = "0.1.0";

// Flat key = value configuration file; '#' comments; relative paths resolve
// against the config file's directory. See README for the key set.
struct Config {
    std::filesystem::path config_path;
    std::string config_hash;

    std::filesystem::path corpus_path;
    corpus::StudyWindow window = corpus::StudyWindow::defaults();
    std::filesystem::path out_dir = "out";
    std::filesystem::path cache_dir = "cache";

    extraction::ServiceConfig service;

    std::filesystem::path lexicon_path;
    std::filesystem::path category_rules_path;
    std::filesystem::path events_palestine_path;
    std::filesystem::path events_israel_path;
    std::filesystem::path weekly_casualties_path;
    std::filesystem::path daily_deaths_path;

    // Desk-scale overrides for stores normally produced by `extract`.
    std::filesystem::path instances_path;
    std::filesystem::path cvn_path;
    std::filesystem::path heart_scores_path;
    std::filesystem::path baseline_mentions_path;

    baseline::BaselineParams baseline_params;
    double day_filter_threshold = 100.0;
    corpus::DateSelectionParams date_params;
    Side date_side = Side::Palestine;
    instances::ChildDeathCounts child_deaths;
    std::vector<std::string> western_outlets = {"BBC", "CNN", "NYT"};
    double alpha = 0.05;

    static Config load(const std::filesystem::path& path);
};

// Exit codes: 0 success, 1 usage, 2 input error, 3 stage prerequisite
// missing, 4 internal/numerical failure.
int run_command(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace newslens::cli

#endif  // NEWSLENS_CLI_HPP
