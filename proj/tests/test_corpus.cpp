#include <doctest.h>

#include <fstream>

#include "newslens/corpus.hpp"
#include "newslens/io.hpp"
#include "testutil.hpp"

using namespace newslens;
using namespace newslens::corpus;

namespace {

std::string article_line(const std::string& id, const std::string& outlet,
                         const std::string& date, const std::string& title,
                         const std::string& body, const std::string& tags = "[\"Gaza\"]",
                         const std::string& kind = "news") {
    return std::string("{\"id\":\"") + id + "\",\"outlet\":\"" + outlet +
           "\",\"published_at\":\"" + date + "\",\"title\":\"" + title + "\",\"body\":\"" +
           body + "\",\"tags\":" + tags + ",\"kind\":\"" + kind + "\"}";
}

Article make_article(const std::string& id, const std::string& outlet, const std::string& date,
                     ArticleKind kind = ArticleKind::News,
                     const std::set<std::string>& tags = {"Gaza"},
                     const std::string& title = "some title") {
    Article a;
    a.id = id;
    a.outlet = outlet;
    a.published_at = *DateTime::parse(date);
    a.title = title;
    a.body = "body text";
    a.tags = tags;
    a.kind = kind;
    return a;
}

}  // namespace

TEST_CASE("load_corpus identity and rejection cases") {
    testutil::TempDir tmp("corpus_load");
    auto path = tmp.path() / "corpus.jsonl";

    SUBCASE("three valid lines load as three articles") {
        std::string text = article_line("a1", "BBC", "2023-10-07", "t1", "b1") + "\n" +
                           article_line("a2", "CNN", "2023-10-08", "t2", "b2") + "\n" +
                           article_line("a3", "NYT", "2023-10-09", "t3", "b3") + "\n";
        io::write_file_atomic(path, text);
        auto result = load_corpus(path, kCorpusSchemaVersion);
        CHECK(result.articles.size() == 3);
        CHECK(result.rejections.empty());
        CHECK(result.articles[0].id == "a1");
        CHECK(result.articles[1].outlet == "CNN");
    }

    SUBCASE("line missing body is rejected with the line number") {
        std::string bad = "{\"id\":\"a2\",\"outlet\":\"CNN\",\"published_at\":\"2023-10-08\","
                          "\"title\":\"t\",\"tags\":[],\"kind\":\"news\"}";
        std::string text = article_line("a1", "BBC", "2023-10-07", "t1", "b1") + "\n" + bad +
                           "\n" + article_line("a3", "NYT", "2023-10-09", "t3", "b3") + "\n";
        io::write_file_atomic(path, text);
        auto result = load_corpus(path, kCorpusSchemaVersion);
        CHECK(result.articles.size() == 2);
        REQUIRE(result.rejections.size() == 1);
        CHECK(result.rejections[0].line_number == 2);
        CHECK(result.rejections[0].reason.find("body") != std::string::npos);
    }

    SUBCASE("unreadable file is fatal") {
        CHECK_THROWS_AS(load_corpus(tmp.path() / "missing.jsonl", kCorpusSchemaVersion),
                        InputError);
    }

    SUBCASE("unsupported schema version is a configuration error") {
        io::write_file_atomic(path, "");
        CHECK_THROWS_AS(load_corpus(path, "2"), ConfigError);
    }

    SUBCASE("duplicate ids are rejected") {
        std::string text = article_line("a1", "BBC", "2023-10-07", "t1", "b1") + "\n" +
                           article_line("a1", "BBC", "2023-10-08", "t2", "b2") + "\n";
        io::write_file_atomic(path, text);
        auto result = load_corpus(path, kCorpusSchemaVersion);
        CHECK(result.articles.size() == 1);
        CHECK(result.rejections.size() == 1);
    }
}

TEST_CASE("load_corpus reproduces the outlet composition of a 1000-line fixture") {
    testutil::TempDir tmp("corpus_comp");
    auto path = tmp.path() / "corpus.jsonl";
    // 40.8% NYT, 27% AJE, 17.8% CNN, 14.4% BBC
    std::string text;
    int idx = 0;
    auto add = [&](const std::string& outlet, int n) {
        for (int i = 0; i < n; ++i)
            text += article_line("id" + std::to_string(idx++), outlet, "2023-11-01", "t", "b") +
                    "\n";
    };
    add("NYT", 408);
    add("AJE", 270);
    add("CNN", 178);
    add("BBC", 144);
    io::write_file_atomic(path, text);
    auto result = load_corpus(path, kCorpusSchemaVersion);
    REQUIRE(result.articles.size() == 1000);
    std::map<std::string, int> counts;
    for (const auto& a : result.articles) counts[a.outlet] += 1;
    CHECK(counts["NYT"] == 408);
    CHECK(counts["AJE"] == 270);
    CHECK(counts["CNN"] == 178);
    CHECK(counts["BBC"] == 144);
}

TEST_CASE("corpus round-trips byte-identically") {
    testutil::TempDir tmp("corpus_rt");
    auto a = make_article("x1", "AJE", "2023-10-07T10:00:00Z");
    auto b = make_article("x2", "BBC", "2023-12-01");
    auto p1 = tmp.path() / "c1.jsonl";
    auto p2 = tmp.path() / "c2.jsonl";
    write_corpus(p1, {a, b});
    auto loaded = load_corpus(p1, kCorpusSchemaVersion);
    REQUIRE(loaded.articles.size() == 2);
    write_corpus(p2, loaded.articles);
    CHECK(io::read_file(p1) == io::read_file(p2));
}

TEST_CASE("filter_articles") {
    auto rules = FilterRules::defaults();

    SUBCASE("tagged news is retained") {
        auto kept = filter_articles({make_article("a", "CNN", "2023-10-08")}, rules);
        CHECK(kept.size() == 1);
    }
    SUBCASE("transcripts are dropped even when tagged") {
        auto kept = filter_articles(
            {make_article("a", "CNN", "2023-10-08", ArticleKind::Transcript)}, rules);
        CHECK(kept.empty());
    }
    SUBCASE("title filtering rescues untagged BBC articles") {
        auto art = make_article("a", "BBC", "2023-10-08", ArticleKind::News, {"UK politics"},
                                "IDF strikes continue");
        CHECK(filter_articles({art}, rules).size() == 1);
        // same article from a non-title-filtered outlet is dropped
        art.outlet = "CNN";
        CHECK(filter_articles({art}, rules).empty());
    }
    SUBCASE("prefix entry matches word variants") {
        auto art = make_article("a", "NYT", "2023-10-08", ArticleKind::News,
                                {"Palestinian territories"});
        CHECK(filter_articles({art}, rules).size() == 1);
        auto art2 = make_article("b", "NYT", "2023-10-08", ArticleKind::News, {"Palestine"});
        CHECK(filter_articles({art2}, rules).size() == 1);
    }
    SUBCASE("multi-token entries and embedded tokens") {
        CHECK(tag_matches("West Bank", rules.tag_whitelist));
        CHECK(tag_matches("Israel-Gaza war", rules.tag_whitelist));
        CHECK(tag_matches("Israel and the Palestinians", rules.tag_whitelist));
        CHECK_FALSE(tag_matches("Westminster", rules.tag_whitelist));
        CHECK_FALSE(tag_matches("banking", rules.tag_whitelist));
    }
    SUBCASE("empty rules are a configuration error") {
        CHECK_THROWS_AS(filter_articles({make_article("a", "CNN", "2023-10-08")}, FilterRules{}),
                        ConfigError);
    }
    SUBCASE("idempotence and order preservation") {
        std::vector<Article> arts{make_article("a", "CNN", "2023-10-08"),
                                  make_article("b", "BBC", "2023-10-09", ArticleKind::LiveFeed),
                                  make_article("c", "AJE", "2023-10-10")};
        auto once = filter_articles(arts, rules);
        auto twice = filter_articles(once, rules);
        REQUIRE(once.size() == 2);
        CHECK(once[0].id == "a");
        CHECK(once[1].id == "c");
        REQUIRE(twice.size() == once.size());
        for (size_t i = 0; i < once.size(); ++i) CHECK(once[i].id == twice[i].id);
    }
}

TEST_CASE("weekly counts") {
    auto window = StudyWindow::defaults();
    CHECK(window.num_weeks() == 53);

    SUBCASE("single article in week zero") {
        auto counts = weekly_counts({make_article("a", "BBC", "2023-10-07")}, window);
        CHECK(counts.by_outlet.at("BBC")[0] == 1);
    }
    SUBCASE("bucket edges: seven days apart lands in adjacent weeks") {
        auto counts = weekly_counts({make_article("a", "BBC", "2023-10-07"),
                                     make_article("b", "BBC", "2023-10-14")},
                                    window);
        CHECK(counts.by_outlet.at("BBC")[0] == 1);
        CHECK(counts.by_outlet.at("BBC")[1] == 1);
        // day 6 still belongs to week 0
        auto edge = weekly_counts({make_article("c", "BBC", "2023-10-13")}, window);
        CHECK(edge.by_outlet.at("BBC")[0] == 1);
    }
    SUBCASE("empty corpus gives an empty outlet map of full window length") {
        auto counts = weekly_counts({}, window);
        CHECK(counts.num_weeks == 53);
        CHECK(counts.by_outlet.empty());
    }
    SUBCASE("totals are conserved per outlet") {
        std::vector<Article> arts;
        std::mt19937_64 rng(3);
        for (int i = 0; i < 150; ++i)
            arts.push_back(make_article(
                "a" + std::to_string(i), i % 2 ? "BBC" : "NYT",
                window.start.plus_days(testutil::uniform_int(rng, 0, 366)).to_string()));
        auto counts = weekly_counts(arts, window);
        long long total = 0;
        for (const auto& [outlet, series] : counts.by_outlet)
            for (auto v : series) total += v;
        CHECK(total == 150);
    }
    SUBCASE("article outside the window names the id") {
        try {
            weekly_counts({make_article("rogue", "BBC", "2025-01-01")}, window);
            FAIL("expected InputError");
        } catch (const InputError& e) {
            CHECK(std::string(e.what()).find("rogue") != std::string::npos);
        }
    }
}

TEST_CASE("event catalog loads sorted and window-checked") {
    auto window = StudyWindow::defaults();
    auto catalog = EventCatalog::load(testutil::data_dir() / "events_palestine.tsv", window);
    REQUIRE(catalog.events.size() == 34);
    for (size_t i = 1; i < catalog.events.size(); ++i)
        CHECK(catalog.events[i - 1].date <= catalog.events[i].date);
    CHECK(catalog.events.front().date.to_string() == "2023-10-07");
    CHECK(catalog.events.back().date.to_string() == "2024-10-06");
    CHECK(catalog.restricted_to(Side::Palestine).events.size() == 34);
    CHECK(catalog.restricted_to(Side::Israel).events.empty());
}

TEST_CASE("date selection reproduces the published analysis dates") {
    auto window = StudyWindow::defaults();
    auto catalog = EventCatalog::load(testutil::data_dir() / "events_palestine.tsv", window)
                       .restricted_to(Side::Palestine);
    auto dates = select_analysis_dates(catalog, window, DateSelectionParams{});
    REQUIRE(dates.size() == 4);
    CHECK(dates[0].to_string() == "2023-12-01");
    CHECK(dates[1].to_string() == "2024-02-29");
    CHECK(dates[2].to_string() == "2024-06-08");
    CHECK(dates[3].to_string() == "2024-09-11");

    // strictly increasing and outside both exclusion windows
    DateSelectionParams prm;
    Date lo = window.start.plus_days(prm.exclusion_head_days);
    Date hi = window.end.plus_days(-prm.exclusion_tail_days);
    for (size_t i = 0; i < dates.size(); ++i) {
        CHECK(lo <= dates[i]);
        CHECK(dates[i] <= hi);
        if (i) CHECK(dates[i - 1] < dates[i]);
    }
}

TEST_CASE("date selection degenerate and tie-break behavior") {
    auto window = StudyWindow::defaults();
    Date d0 = window.start.plus_days(60);

    SUBCASE("exactly k admissible events are returned regardless of spacing") {
        EventCatalog cat;
        cat.events = {{d0, "e0", Side::Palestine},
                      {d0.plus_days(5), "e1", Side::Palestine},
                      {d0.plus_days(11), "e2", Side::Palestine},
                      {d0.plus_days(200), "e3", Side::Palestine}};
        auto dates = select_analysis_dates(cat, window, DateSelectionParams{});
        REQUIRE(dates.size() == 4);
        CHECK(dates[0] == d0);
        CHECK(dates[3] == d0.plus_days(200));
    }

    SUBCASE("equidistant candidates break ties toward the earlier date") {
        // k = 3 over a 190-day admissible span: ideal spacing 95; slot 2 sees
        // gaps 90 and 100 from the anchor, both 5 days from the target.
        DateSelectionParams prm;
        prm.k = 3;
        prm.exclusion_head_days = 55;
        prm.exclusion_tail_days = 366 - 55 - 190;
        Date first = window.start.plus_days(55);
        EventCatalog cat;
        cat.events = {{first, "anchor", Side::Palestine},
                      {first.plus_days(90), "minus5", Side::Palestine},
                      {first.plus_days(100), "plus5", Side::Palestine},
                      {first.plus_days(190), "end", Side::Palestine}};
        auto dates = select_analysis_dates(cat, window, prm);
        REQUIRE(dates.size() == 3);
        CHECK(dates[1] == first.plus_days(90));  // tie -> earlier
        CHECK(dates[2] == first.plus_days(190));
    }

    SUBCASE("fewer than k admissible events reports the count") {
        EventCatalog cat;
        cat.events = {{d0, "only", Side::Palestine}};
        try {
            select_analysis_dates(cat, window, DateSelectionParams{});
            FAIL("expected InputError");
        } catch (const InputError& e) {
            CHECK(std::string(e.what()).find("found 1") != std::string::npos);
        }
    }
}

TEST_CASE("casualty series loader") {
    testutil::TempDir tmp("casualties");
    auto window = StudyWindow::defaults();
    auto path = tmp.path() / "weekly.tsv";

    std::string text = "week_index\tdeaths_p\tdeaths_i\tinjured_p\tinjured_i\n";
    for (int w = 0; w < window.num_weeks(); ++w)
        text += std::to_string(w) + "\t" + std::to_string(100 + w) + "\t5\t200\t10\n";
    io::write_file_atomic(path, text);
    auto series = CasualtySeries::load_weekly(path, window);
    CHECK(series.deaths_palestine.size() == 53);
    CHECK(series.deaths_palestine[0] == 100);
    CHECK(series.deaths_palestine[52] == 152);
    CHECK(series.injured_israel[7] == 10);

    SUBCASE("missing week is rejected") {
        std::string gap = "week_index\tdeaths_p\tdeaths_i\tinjured_p\tinjured_i\n"
                          "0\t1\t1\t1\t1\n";
        io::write_file_atomic(path, gap);
        CHECK_THROWS_AS(CasualtySeries::load_weekly(path, window), InputError);
    }
    SUBCASE("negative counts are rejected") {
        std::string neg = "week_index\tdeaths_p\tdeaths_i\tinjured_p\tinjured_i\n"
                          "0\t-1\t1\t1\t1\n";
        io::write_file_atomic(path, neg);
        CHECK_THROWS_AS(CasualtySeries::load_weekly(path, window), InputError);
    }
    SUBCASE("daily deaths merge") {
        auto daily_path = tmp.path() / "daily.tsv";
        io::write_file_atomic(daily_path,
                              "date\tdeaths_p\tdeaths_i\n2023-12-01\t184\t0\n2024-02-29\t117\t0\n");
        series.load_daily(daily_path, window);
        CHECK(series.daily_deaths.size() == 2);
        CHECK(series.daily_deaths.at(*Date::parse("2023-12-01")).first == 184);
    }
}
