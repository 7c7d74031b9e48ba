#include <doctest.h>

#include <fstream>

#include "newslens/cli.hpp"
#include "newslens/cvn.hpp"
#include "newslens/io.hpp"
#include "stub_service.hpp"
#include "testutil.hpp"

using namespace newslens;

namespace {

// Minimal config writer; paths are absolute so the file can live anywhere.
std::string base_config(const std::filesystem::path& out_dir,
                        const std::filesystem::path& cache_dir) {
    auto fixtures = testutil::source_dir() / "tests" / "fixtures";
    std::string cfg;
    cfg += "corpus_path = " + (fixtures / "synthetic_corpus.jsonl").string() + "\n";
    cfg += "out_dir = " + out_dir.string() + "\n";
    cfg += "cache_dir = " + cache_dir.string() + "\n";
    cfg += "lexicon_path = " + (testutil::data_dir() / "doubt_lexicon.tsv").string() + "\n";
    cfg += "category_rules_path = " +
           (testutil::data_dir() / "cvn_category_rules.tsv").string() + "\n";
    cfg += "events_palestine_path = " +
           (testutil::data_dir() / "events_palestine.tsv").string() + "\n";
    cfg += "events_israel_path = " + (testutil::data_dir() / "events_israel.tsv").string() +
           "\n";
    cfg += "weekly_casualties_path = " + (fixtures / "casualties_weekly.tsv").string() + "\n";
    cfg += "daily_deaths_path = " + (fixtures / "daily_deaths.tsv").string() + "\n";
    return cfg;
}

std::filesystem::path write_config(const testutil::TempDir& tmp, const std::string& content) {
    auto path = tmp.path() / "newslens.conf";
    io::write_file_atomic(path, content);
    return path;
}

int run(const std::vector<std::string>& args) { return cli::run_command(args); }

std::string strip_timestamps(std::string manifest) {
    for (const char* key : {"\"started_at\"", "\"finished_at\""}) {
        auto pos = manifest.find(key);
        while (pos != std::string::npos) {
            auto end = manifest.find('\n', pos);
            manifest.erase(pos, end - pos);
            pos = manifest.find(key);
        }
    }
    return manifest;
}

std::vector<std::string> csv_column(const std::filesystem::path& path, size_t column) {
    std::vector<std::string> out;
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        auto fields = str::split(line, ',');
        REQUIRE(fields.size() > column);
        out.push_back(fields[column]);
    }
    return out;
}

}  // namespace

TEST_CASE("config loading") {
    testutil::TempDir tmp("cli_config");
    SUBCASE("relative paths resolve against the config directory") {
        auto path = write_config(tmp, "corpus_path = sub/corpus.jsonl\n");
        auto cfg = cli::Config::load(path);
        CHECK(cfg.corpus_path == tmp.path() / "sub" / "corpus.jsonl");
        CHECK(cfg.window.start.to_string() == "2023-10-07");
        CHECK(cfg.window.end.to_string() == "2024-10-07");
    }
    SUBCASE("unknown keys are rejected") {
        auto path = write_config(tmp, "corups_path = typo.jsonl\n");
        CHECK_THROWS_AS(cli::Config::load(path), ConfigError);
    }
    SUBCASE("baseline and date parameters are settable") {
        auto path = write_config(tmp,
                                 "baseline_delta_p = 0.5\nbaseline_delta_i = 0.9\n"
                                 "date_tolerance_min_days = 80\nwestern_outlets = BBC, NYT\n"
                                 "day_filter_threshold = 42\n");
        auto cfg = cli::Config::load(path);
        CHECK(cfg.baseline_params.delta_p == 0.5);
        CHECK(cfg.baseline_params.delta_i == 0.9);
        CHECK(cfg.date_params.tolerance_min_days == 80);
        CHECK(cfg.western_outlets == std::vector<std::string>{"BBC", "NYT"});
        CHECK(cfg.day_filter_threshold == 42.0);
    }
    SUBCASE("inverted window is rejected") {
        auto path = write_config(tmp, "window_start = 2024-12-01\nwindow_end = 2024-01-01\n");
        CHECK_THROWS_AS(cli::Config::load(path), ConfigError);
    }
}

TEST_CASE("usage errors exit 1") {
    CHECK(run({"frobnicate"}) == 1);
    CHECK(run({}) == 1);
    CHECK(run({"analyze"}) == 1);  // missing positional
}

TEST_CASE("missing config exits 2, missing stage exits 3") {
    testutil::TempDir tmp("cli_exits");
    CHECK(run({"ingest", "--config", (tmp.path() / "nope.conf").string()}) == 2);

    auto cfg_path = write_config(tmp, base_config(tmp.path() / "out", tmp.path() / "cache"));
    CHECK(run({"analyze", "individualization", "--config", cfg_path.string()}) == 3);
    CHECK(run({"analyze", "cvn", "--config", cfg_path.string()}) == 3);
    CHECK(run({"extract", "instances", "--config", cfg_path.string()}) == 3);
}

TEST_CASE("ingest stages the corpus deterministically") {
    testutil::TempDir tmp("cli_ingest");
    auto out = tmp.path() / "out";
    auto cfg_path = write_config(tmp, base_config(out, tmp.path() / "cache"));

    REQUIRE(run({"ingest", "--config", cfg_path.string()}) == 0);
    CHECK(std::filesystem::exists(out / "corpus" / "filtered.jsonl"));
    CHECK(std::filesystem::exists(out / "corpus" / "rejections.tsv"));
    CHECK(std::filesystem::exists(out / "series" / "article_counts_weekly.csv"));
    CHECK(std::filesystem::exists(out / "manifests" / "ingest.json"));

    // the two malformed lines are reported
    auto rejections = io::read_file(out / "corpus" / "rejections.tsv");
    CHECK(rejections.find("broken-1") == std::string::npos);  // reasons only, no ids leaked
    int rejection_lines = 0;
    for (char c : rejections)
        if (c == '\n') ++rejection_lines;
    CHECK(rejection_lines == 3);  // header + 2 bad lines

    // noise is filtered: transcripts, summaries, live feeds, off-topic tags
    auto staged = corpus::load_corpus(out / "corpus" / "filtered.jsonl",
                                      corpus::kCorpusSchemaVersion);
    CHECK(staged.articles.size() == 52);
    for (const auto& a : staged.articles) CHECK(a.kind == corpus::ArticleKind::News);

    auto manifest1 = strip_timestamps(io::read_file(out / "manifests" / "ingest.json"));
    REQUIRE(run({"ingest", "--config", cfg_path.string()}) == 0);
    auto manifest2 = strip_timestamps(io::read_file(out / "manifests" / "ingest.json"));
    CHECK(manifest1 == manifest2);
}

TEST_CASE("analyze baseline from the mentions fixture matches the library") {
    testutil::TempDir tmp("cli_baseline");
    auto out = tmp.path() / "out";
    auto fixtures = testutil::source_dir() / "tests" / "fixtures";
    std::string cfg_text = base_config(out, tmp.path() / "cache");
    cfg_text += "baseline_mentions_path = " + (fixtures / "baseline_mentions.tsv").string() +
                "\n";
    auto cfg_path = write_config(tmp, cfg_text);

    REQUIRE(run({"analyze", "baseline", "--config", cfg_path.string()}) == 0);
    for (const char* outlet : {"AJE", "BBC", "CNN", "NYT"})
        CHECK(std::filesystem::exists(out / "series" /
                                      (std::string("baseline_") + outlet + ".csv")));

    // recompute one outlet with the library and compare every numeric cell
    auto window = corpus::StudyWindow::defaults();
    auto casualties =
        corpus::CasualtySeries::load_weekly(fixtures / "casualties_weekly.tsv", window);
    baseline::BaselineInputs inputs;
    inputs.casualties_p.assign(casualties.deaths_palestine.begin(),
                               casualties.deaths_palestine.end());
    inputs.casualties_i.assign(casualties.deaths_israel.begin(),
                               casualties.deaths_israel.end());
    inputs.mentions_p.assign(window.num_weeks(), 0.0);
    inputs.mentions_i.assign(window.num_weeks(), 0.0);
    auto rows = io::read_tsv(fixtures / "baseline_mentions.tsv");
    for (size_t i = 1; i < rows.size(); ++i) {
        if (rows[i][0] != "BBC") continue;
        int w = std::stoi(rows[i][1]);
        inputs.mentions_p[w] = std::stod(rows[i][2]);
        inputs.mentions_i[w] = std::stod(rows[i][3]);
    }
    auto expected = baseline::expected_series(inputs, baseline::BaselineParams{});

    auto w_p_col = csv_column(out / "series" / "baseline_BBC.csv", 7);
    auto gap_col = csv_column(out / "series" / "baseline_BBC.csv", 10);
    REQUIRE(w_p_col.size() == static_cast<size_t>(window.num_weeks()));
    for (int t = 0; t < window.num_weeks(); ++t) {
        if (expected.w_p[t]) {
            CHECK(std::stod(w_p_col[t]) ==
                  doctest::Approx(*expected.w_p[t]).epsilon(1e-9));
        } else {
            CHECK(w_p_col[t].empty());
        }
        if (expected.gap_p[t]) {
            CHECK(std::stod(gap_col[t]) ==
                  doctest::Approx(*expected.gap_p[t]).epsilon(1e-9).scale(1.0));
        } else {
            CHECK(gap_col[t].empty());
        }
    }
    CHECK(std::filesystem::exists(out / "tables" / "baseline_gap_summary.csv"));
}

TEST_CASE("analyze individualization reproduces the published ratio column") {
    testutil::TempDir tmp("cli_ig");
    auto out = tmp.path() / "out";

    // Instance store seeded with the published per-cell counts.
    std::vector<instances::InstanceRecord> records;
    auto window = corpus::StudyWindow::defaults();
    long long article_seq = 0;
    auto add_cell = [&](const std::string& outlet, Side side, long long individual,
                        long long group) {
        instances::InstanceRecord base;
        base.outlet = outlet;
        base.side = side;
        base.civilian_status = instances::CivilianStatus::Civilian;
        base.location = side == Side::Palestine ? instances::Location::Gaza
                                                : instances::Location::Israel;
        long long n = individual + group;
        for (long long i = 0; i < n; ++i) {
            auto r = base;
            r.article_id = outlet + "-art-" + std::to_string(article_seq / 20);
            if (i % 20 == 19) ++article_seq;
            r.published_at = window.start.plus_days((i * 7) % 360);
            if (i < individual) {
                r.type = instances::InstanceType::Individualized;
                r.entity = "story " + std::to_string(i);
                r.primary = instances::YesNoNA::Yes;
                r.quoted = instances::YesNoNA::NA;
            } else {
                r.type = instances::InstanceType::Grouped;
                r.entity = "group " + std::to_string(i);
                r.primary = instances::YesNoNA::NA;
                r.quoted = instances::YesNoNA::No;
            }
            r.phrases = "phrase";
            records.push_back(std::move(r));
        }
        ++article_seq;
    };
    add_cell("AJE", Side::Palestine, 1540, 17773);
    add_cell("AJE", Side::Israel, 299, 4257);
    add_cell("BBC", Side::Palestine, 863, 7414);
    add_cell("BBC", Side::Israel, 1042, 5118);
    add_cell("CNN", Side::Palestine, 718, 8075);
    add_cell("CNN", Side::Israel, 669, 5178);
    add_cell("NYT", Side::Palestine, 1291, 16413);
    add_cell("NYT", Side::Israel, 1628, 10488);

    auto store_path = tmp.path() / "instances.jsonl";
    instances::write_instance_store(store_path, records);

    std::string cfg_text = base_config(out, tmp.path() / "cache");
    cfg_text += "instances_path = " + store_path.string() + "\n";
    auto cfg_path = write_config(tmp, cfg_text);
    REQUIRE(run({"analyze", "individualization", "--config", cfg_path.string()}) == 0);

    auto ratio_col = csv_column(out / "tables" / "ig_ratio.csv", 4);
    std::vector<std::string> expected{"0.09", "0.07", "0.12", "0.20",
                                      "0.09", "0.13", "0.08", "0.16"};
    CHECK(ratio_col == expected);

    // GEE summary exists with one row per outlet
    auto gee_rows = csv_column(out / "tables" / "gee_summary.csv", 0);
    CHECK(gee_rows == std::vector<std::string>{"AJE", "BBC", "CNN", "NYT"});
    CHECK(std::filesystem::exists(out / "tables" / "gee_fits.txt"));
    CHECK(std::filesystem::exists(out / "tables" / "secondary_primary.csv"));
    CHECK(std::filesystem::exists(out / "tables" / "child_shares.csv"));
}

TEST_CASE("analyze dates emits the published dates and story counts") {
    testutil::TempDir tmp("cli_dates");
    auto out = tmp.path() / "out";

    // seed a handful of stories around the first analysis date
    std::vector<instances::InstanceRecord> records;
    auto mk = [&](const std::string& id, Side side, const char* date, bool oct7) {
        instances::InstanceRecord r;
        r.article_id = id;
        r.outlet = "BBC";
        r.published_at = *Date::parse(date);
        r.type = instances::InstanceType::Individualized;
        r.entity = "W" + id;
        r.side = side;
        r.civilian_status = instances::CivilianStatus::Civilian;
        r.location = side == Side::Palestine ? instances::Location::Gaza
                                             : instances::Location::Israel;
        r.primary = instances::YesNoNA::Yes;
        r.quoted = instances::YesNoNA::NA;
        r.phrases = "p";
        r.oct7_related = oct7;
        records.push_back(r);
    };
    mk("s1", Side::Palestine, "2023-12-01", false);
    mk("s2", Side::Palestine, "2023-12-02", false);
    mk("s3", Side::Israel, "2023-12-01", true);
    mk("s4", Side::Israel, "2023-12-02", true);
    mk("s5", Side::Israel, "2023-12-02", false);  // not Oct-7 framed: excluded
    mk("s6", Side::Israel, "2023-12-05", true);   // outside the lag: excluded

    auto store_path = tmp.path() / "instances.jsonl";
    instances::write_instance_store(store_path, records);
    std::string cfg_text = base_config(out, tmp.path() / "cache");
    cfg_text += "instances_path = " + store_path.string() + "\n";
    auto cfg_path = write_config(tmp, cfg_text);

    REQUIRE(run({"analyze", "dates", "--config", cfg_path.string()}) == 0);
    auto dates = csv_column(out / "tables" / "analysis_dates.csv", 1);
    CHECK(dates == std::vector<std::string>{"2023-12-01", "2024-02-29", "2024-06-08",
                                            "2024-09-11"});

    auto counts = io::read_file(out / "tables" / "date_story_counts.csv");
    CHECK(counts.find("BBC,2023-12-01,2,2") != std::string::npos);
    CHECK(std::filesystem::exists(out / "tables" / "lagged_correlation.csv"));
}

TEST_CASE("full pipeline smoke test against the canned stub") {
    teststub::StubService stub(teststub::canned_response);
    testutil::TempDir tmp("cli_pipeline");
    auto out = tmp.path() / "out";
    std::string cfg_text = base_config(out, tmp.path() / "cache");
    cfg_text += "service_endpoint = " + stub.endpoint() + "\n";
    cfg_text += "service_model = canned\n";
    cfg_text += "service_backoff_ms = 1\n";
    auto cfg_path = write_config(tmp, cfg_text);

    REQUIRE(run({"ingest", "--config", cfg_path.string()}) == 0);
    REQUIRE(run({"extract", "instances", "--config", cfg_path.string()}) == 0);
    REQUIRE(run({"extract", "hardship", "--config", cfg_path.string()}) == 0);
    REQUIRE(run({"extract", "child", "--config", cfg_path.string()}) == 0);
    REQUIRE(run({"extract", "cvn", "--config", cfg_path.string()}) == 0);
    REQUIRE(run({"extract", "citation", "--config", cfg_path.string()}) == 0);
    REQUIRE(run({"extract", "heart", "--config", cfg_path.string()}) == 0);
    REQUIRE(run({"extract", "doubt", "--config", cfg_path.string()}) == 0);
    int calls_after_extract = stub.calls();
    CHECK(calls_after_extract > 0);

    REQUIRE(run({"analyze", "individualization", "--config", cfg_path.string()}) == 0);
    REQUIRE(run({"analyze", "cvn", "--config", cfg_path.string()}) == 0);
    REQUIRE(run({"analyze", "baseline", "--config", cfg_path.string()}) == 0);
    REQUIRE(run({"analyze", "heart", "--config", cfg_path.string()}) == 0);
    REQUIRE(run({"analyze", "dates", "--config", cfg_path.string()}) == 0);
    REQUIRE(run({"report", "--config", cfg_path.string()}) == 0);

    // analyze commands never touch the network
    CHECK(stub.calls() == calls_after_extract);

    CHECK(std::filesystem::exists(out / "tables" / "ig_ratio.csv"));
    CHECK(std::filesystem::exists(out / "tables" / "doubt_tally.csv"));
    CHECK(std::filesystem::exists(out / "tables" / "citation_stats.csv"));
    CHECK(std::filesystem::exists(out / "series" / "heart_diffs.csv"));
    CHECK(std::filesystem::exists(out / "report" / "index.csv"));

    // re-running extraction offline hits only the cache
    REQUIRE(run({"extract", "instances", "--config", cfg_path.string(), "--offline"}) == 0);
    CHECK(stub.calls() == calls_after_extract);

    // doubt tallies from the canned sentences stay internally consistent
    auto store = cvn::load_cvn_store(out / "extractions" / "cvn.jsonl");
    CHECK(store.rejections.empty());
    CHECK(!store.records.empty());
}
