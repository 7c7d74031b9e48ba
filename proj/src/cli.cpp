#include "newslens/cli.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "newslens/cvn.hpp"
#include "newslens/heart.hpp"
#include "newslens/io.hpp"
#include "newslens/stats.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace newslens::cli {

namespace {

struct PrerequisiteError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string now_iso8601() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

fs::path resolve(const fs::path& base_dir, const std::string& value) {
    fs::path p(value);
    if (p.is_absolute()) return p;
    return base_dir / p;
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("bad boolean value: " + v);
}

// Writes a RunManifest for one command; identical config + inputs produce
// identical manifests apart from the two timestamps.
struct ManifestWriter {
    const Config& cfg;
    std::string command;
    std::string started_at = now_iso8601();
    std::map<std::string, std::string> input_hashes;
    std::map<std::string, long long> record_counts;

    void add_input(const std::string& name, const fs::path& path) {
        input_hashes[name] = sha256_hex(io::read_file(path));
    }
    void write() const {
        json j;
        j["command"] = command;
        j["tool_version"] = kToolVersion;
        j["config_hash"] = cfg.config_hash;
        j["input_hashes"] = input_hashes;
        j["record_counts"] = record_counts;
        j["started_at"] = started_at;
        j["finished_at"] = now_iso8601();
        io::write_file_atomic(cfg.out_dir / "manifests" / (command + ".json"),
                              j.dump(2) + "\n");
    }
};

// ---------------------------------------------------------------------------
// staged paths

fs::path staged_corpus(const Config& cfg) { return cfg.out_dir / "corpus" / "filtered.jsonl"; }
fs::path staged_instances(const Config& cfg) {
    return cfg.out_dir / "extractions" / "instances.jsonl";
}
fs::path staged_cvn(const Config& cfg) { return cfg.out_dir / "extractions" / "cvn.jsonl"; }
fs::path staged_heart(const Config& cfg) { return cfg.out_dir / "extractions" / "heart.tsv"; }

// Explicit config overrides win over staged stores; a missing store names the
// producing command.
fs::path require_store(const fs::path& override_path, const fs::path& staged,
                       const std::string& producer) {
    if (!override_path.empty()) {
        if (fs::exists(override_path)) return override_path;
        throw InputError("configured store does not exist: " + override_path.string());
    }
    if (fs::exists(staged)) return staged;
    throw PrerequisiteError("missing stage input " + staged.string() + "; run `" + producer +
                            "` first");
}

std::vector<corpus::Article> load_staged_corpus(const Config& cfg, ManifestWriter& manifest) {
    fs::path path = staged_corpus(cfg);
    if (!fs::exists(path))
        throw PrerequisiteError("missing stage input " + path.string() + "; run `ingest` first");
    manifest.add_input("filtered_corpus", path);
    auto loaded = corpus::load_corpus(path, corpus::kCorpusSchemaVersion);
    if (!loaded.rejections.empty())
        throw InputError("staged corpus is corrupt: line " +
                         std::to_string(loaded.rejections.front().line_number) + ": " +
                         loaded.rejections.front().reason);
    return std::move(loaded.articles);
}

// ---------------------------------------------------------------------------
// ingest

int cmd_ingest(const Config& cfg) {
    ManifestWriter manifest{cfg, "ingest"};
    if (cfg.corpus_path.empty()) throw ConfigError("corpus_path not configured");
    manifest.add_input("corpus", cfg.corpus_path);

    auto loaded = corpus::load_corpus(cfg.corpus_path, corpus::kCorpusSchemaVersion);
    auto filtered = corpus::filter_articles(loaded.articles, corpus::FilterRules::defaults());
    auto weekly = corpus::weekly_counts(filtered, cfg.window);

    corpus::write_corpus(staged_corpus(cfg), filtered);

    std::string rejections = "line\treason\n";
    for (const auto& r : loaded.rejections)
        rejections += std::to_string(r.line_number) + "\t" + r.reason + "\n";
    io::write_file_atomic(cfg.out_dir / "corpus" / "rejections.tsv", rejections);

    std::string csv = "outlet,week_index,count\n";
    for (const auto& [outlet, series] : weekly.by_outlet)
        for (int w = 0; w < weekly.num_weeks; ++w)
            csv += io::csv_row({outlet, std::to_string(w), std::to_string(series[w])});
    io::write_file_atomic(cfg.out_dir / "series" / "article_counts_weekly.csv", csv);

    manifest.record_counts["loaded"] = static_cast<long long>(loaded.articles.size());
    manifest.record_counts["rejected_lines"] = static_cast<long long>(loaded.rejections.size());
    manifest.record_counts["retained"] = static_cast<long long>(filtered.size());
    manifest.write();
    return 0;
}

// ---------------------------------------------------------------------------
// extract

// Runs `work(i)` for i in [0, n) on up to `jobs` threads; the first exception
// wins and is rethrown after all workers stop.
void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& work) {
    int threads = std::max(1, jobs);
    if (threads == 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) work(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto runner = [&] {
        while (!failed) {
            size_t i = next.fetch_add(1);
            if (i >= n) break;
            try {
                work(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed = true;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<size_t>(threads, n); ++t) pool.emplace_back(runner);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

void write_validation_report(const fs::path& path, const extraction::ValidationReport& report) {
    std::string out = "metric\tvalue\n";
    out += "accepted\t" + std::to_string(report.accepted) + "\n";
    out += "rejected\t" + std::to_string(report.rejected) + "\n";
    for (const auto& [reason, count] : report.reasons)
        out += "reason: " + reason + "\t" + std::to_string(count) + "\n";
    io::write_file_atomic(path, out);
}

void merge_report(extraction::ValidationReport& into, const extraction::ValidationReport& from) {
    into.accepted += from.accepted;
    into.rejected += from.rejected;
    for (const auto& [reason, count] : from.reasons) into.reasons[reason] += count;
}

int cmd_extract_instances(const Config& cfg, ManifestWriter& manifest) {
    auto articles = load_staged_corpus(cfg, manifest);
    extraction::ExtractionCache cache(cfg.cache_dir);
    const auto& tpl = extraction::prompt_registry(extraction::PromptId::P1Instances);

    std::vector<extraction::ParseResult> parsed(articles.size());
    parallel_for(articles.size(), cfg.service.jobs, [&](size_t i) {
        auto raw = extraction::extract(articles[i], extraction::PromptId::P1Instances, {},
                                       cfg.service, cache);
        parsed[i] = extraction::parse_and_validate(raw, tpl);
    });

    extraction::ValidationReport total;
    std::vector<instances::InstanceRecord> records;
    for (size_t i = 0; i < articles.size(); ++i) {
        merge_report(total, parsed[i].report);
        for (const auto& fields : parsed[i].records) {
            instances::InstanceRecord r;
            r.article_id = articles[i].id;
            r.outlet = articles[i].outlet;
            r.published_at = articles[i].published_at.date;
            auto type = instances::parse_instance_type(fields.at("Type"));
            auto side = parse_side(fields.at("Side"));
            auto status = instances::parse_civilian_status(fields.at("Civilian_Status"));
            auto location = instances::parse_location(fields.at("Location"));
            auto primary = instances::parse_yes_no_na(fields.at("Primary"));
            auto quoted = instances::parse_yes_no_na(fields.at("Quoted"));
            if (!type || !side || !status || !location || !primary || !quoted) {
                total.reasons["record with N_A enum skipped"] += 1;
                continue;
            }
            r.type = *type;
            r.side = *side;
            r.civilian_status = *status;
            r.location = *location;
            // the prompt contract: grouped instances carry Primary == N_A,
            // individualized ones carry Quoted == N_A
            r.primary = (r.type == instances::InstanceType::Grouped) ? instances::YesNoNA::NA
                                                                     : *primary;
            r.quoted = (r.type == instances::InstanceType::Individualized)
                           ? instances::YesNoNA::NA
                           : *quoted;
            r.entity = fields.at("Entity");
            r.phrases = fields.at("Phrases");
            records.push_back(std::move(r));
        }
    }
    instances::write_instance_store(staged_instances(cfg), records);
    write_validation_report(cfg.out_dir / "extractions" / "instances_validation.tsv", total);
    manifest.record_counts["articles"] = static_cast<long long>(articles.size());
    manifest.record_counts["instances"] = static_cast<long long>(records.size());
    manifest.record_counts["rejected_records"] = total.rejected;
    return 0;
}

int cmd_extract_hardship(const Config& cfg, ManifestWriter& manifest) {
    auto articles = load_staged_corpus(cfg, manifest);
    std::map<std::string, const corpus::Article*> by_id;
    for (const auto& a : articles) by_id[a.id] = &a;

    fs::path store_path = require_store({}, staged_instances(cfg), "extract instances");
    manifest.add_input("instances", store_path);
    auto store = instances::load_instance_store(store_path);
    auto stories = instances::filter_individualized_stories(store.records);

    extraction::ExtractionCache cache(cfg.cache_dir);
    const auto& tpl = extraction::prompt_registry(extraction::PromptId::P2Hardship);

    struct Update {
        std::optional<instances::Hardship> hardship;
        std::optional<bool> oct7;
    };
    std::map<std::pair<std::string, std::string>, Update> updates;
    std::vector<Update> results(stories.size());
    parallel_for(stories.size(), cfg.service.jobs, [&](size_t i) {
        const auto& s = stories[i];
        auto art = by_id.find(s.article_id);
        if (art == by_id.end())
            throw InputError("instance references unknown article: " + s.article_id);
        std::map<std::string, std::string> bindings{{"identifier", s.entity},
                                                    {"story_phrases", s.phrases}};
        auto raw = extraction::extract(*art->second, extraction::PromptId::P2Hardship, bindings,
                                       cfg.service, cache);
        auto parsed = extraction::parse_and_validate(raw, tpl);
        if (!parsed.records.empty()) {
            const auto& f = parsed.records.front();
            results[i].hardship = instances::parse_hardship(f.at("Hardship"));
            results[i].oct7 = f.at("Oct_7_Attack") == "Yes";
        }
    });
    for (size_t i = 0; i < stories.size(); ++i)
        updates[{stories[i].article_id, str::normalize_key(stories[i].entity)}] = results[i];

    long long updated = 0;
    for (auto& r : store.records) {
        auto it = updates.find({r.article_id, str::normalize_key(r.entity)});
        if (it == updates.end()) continue;
        if (it->second.hardship) r.hardship = it->second.hardship;
        if (it->second.oct7) r.oct7_related = it->second.oct7;
        ++updated;
    }
    instances::write_instance_store(store_path, store.records);
    manifest.record_counts["stories"] = static_cast<long long>(stories.size());
    manifest.record_counts["updated"] = updated;
    return 0;
}

int cmd_extract_child(const Config& cfg, ManifestWriter& manifest) {
    auto articles = load_staged_corpus(cfg, manifest);
    std::map<std::string, const corpus::Article*> by_id;
    for (const auto& a : articles) by_id[a.id] = &a;

    fs::path store_path = require_store({}, staged_instances(cfg), "extract instances");
    manifest.add_input("instances", store_path);
    auto store = instances::load_instance_store(store_path);

    extraction::ExtractionCache cache(cfg.cache_dir);
    const auto& tpl = extraction::prompt_registry(extraction::PromptId::P3Child);

    std::vector<std::optional<std::string>> terms(store.records.size());
    parallel_for(store.records.size(), cfg.service.jobs, [&](size_t i) {
        const auto& r = store.records[i];
        auto art = by_id.find(r.article_id);
        if (art == by_id.end())
            throw InputError("instance references unknown article: " + r.article_id);
        std::map<std::string, std::string> bindings{
            {"identifier", r.entity},
            {"entity_type", instances::instance_type_name(r.type)},
            {"phrase", r.phrases}};
        auto raw = extraction::extract(*art->second, extraction::PromptId::P3Child, bindings,
                                       cfg.service, cache);
        auto parsed = extraction::parse_and_validate(raw, tpl);
        if (!parsed.records.empty()) {
            std::string term = parsed.records.front().at("Is_Child");
            if (term != "N_A" && term != "Not Applicable" && !term.empty()) terms[i] = term;
        }
    });
    for (size_t i = 0; i < store.records.size(); ++i)
        if (terms[i]) store.records[i].child_term = terms[i];
    instances::write_instance_store(store_path, store.records);
    manifest.record_counts["records"] = static_cast<long long>(store.records.size());
    return 0;
}

int cmd_extract_cvn(const Config& cfg, ManifestWriter& manifest) {
    auto articles = load_staged_corpus(cfg, manifest);
    extraction::ExtractionCache cache(cfg.cache_dir);
    const auto& tpl = extraction::prompt_registry(extraction::PromptId::CvnExtract);

    std::vector<extraction::ParseResult> parsed(articles.size());
    parallel_for(articles.size(), cfg.service.jobs, [&](size_t i) {
        auto raw = extraction::extract(articles[i], extraction::PromptId::CvnExtract, {},
                                       cfg.service, cache);
        parsed[i] = extraction::parse_and_validate(raw, tpl);
    });

    extraction::ValidationReport total;
    std::vector<cvn::CvnRecord> records;
    for (size_t i = 0; i < articles.size(); ++i) {
        merge_report(total, parsed[i].report);
        for (const auto& f : parsed[i].records) {
            cvn::CvnRecord r;
            r.article_id = articles[i].id;
            r.outlet = articles[i].outlet;
            r.published_at = articles[i].published_at.date;
            r.keyword = f.at("Keyword");
            r.statistics = f.at("Statistics");
            r.statistics_type = f.at("Statistics Type");
            r.association = f.at("Association");
            r.is_child = f.at("Is Child") == "Yes";
            r.is_human = f.at("Is Human") == "Yes";
            r.group_size = *cvn::parse_group_size(f.at("Group Size"));
            if (!r.is_human) r.group_size = cvn::GroupSize::NotApplicable;
            r.nationality = f.at("Nationality");
            r.side = *parse_side(f.at("Side"));
            r.sentence = f.at("Sentence");
            records.push_back(std::move(r));
        }
    }
    cvn::write_cvn_store(staged_cvn(cfg), records);
    write_validation_report(cfg.out_dir / "extractions" / "cvn_validation.tsv", total);
    manifest.record_counts["articles"] = static_cast<long long>(articles.size());
    manifest.record_counts["cvns"] = static_cast<long long>(records.size());
    manifest.record_counts["rejected_records"] = total.rejected;
    return 0;
}

int cmd_extract_citation(const Config& cfg, ManifestWriter& manifest) {
    fs::path store_path = require_store({}, staged_cvn(cfg), "extract cvn");
    manifest.add_input("cvn", store_path);
    auto store = cvn::load_cvn_store(store_path);

    extraction::ExtractionCache cache(cfg.cache_dir);
    const auto& tpl = extraction::prompt_registry(extraction::PromptId::CvnCitation);

    parallel_for(store.records.size(), cfg.service.jobs, [&](size_t i) {
        auto& r = store.records[i];
        corpus::Article stub;  // citation prompt binds the sentence, not the body
        stub.id = r.article_id;
        std::map<std::string, std::string> bindings{{"sentence", r.sentence},
                                                    {"statistics", r.statistics},
                                                    {"association", r.association},
                                                    {"article", ""}};
        auto raw = extraction::extract(stub, extraction::PromptId::CvnCitation, bindings,
                                       cfg.service, cache);
        auto parsed = extraction::parse_and_validate(raw, tpl);
        if (!parsed.records.empty()) {
            const auto& f = parsed.records.front();
            r.cited = f.at("Cited") == "Yes";
            if (*r.cited) {
                r.citing_source = f.at("Citing_Source");
                r.citing_phrase = f.at("Phrase");
            }
        }
    });
    cvn::write_cvn_store(store_path, store.records);
    manifest.record_counts["cvns"] = static_cast<long long>(store.records.size());
    return 0;
}

int cmd_extract_heart(const Config& cfg, ManifestWriter& manifest) {
    fs::path store_path = require_store({}, staged_instances(cfg), "extract instances");
    manifest.add_input("instances", store_path);
    auto store = instances::load_instance_store(store_path);
    auto stories = instances::filter_individualized_stories(store.records);

    extraction::ExtractionCache cache(cfg.cache_dir);
    const extraction::PromptId prompts[2] = {extraction::PromptId::HeartVividness,
                                             extraction::PromptId::HeartPlotVolume};
    const char* metric_names[2] = {"vividness", "plot_volume"};

    std::vector<std::array<std::string, 2>> ratings(stories.size());
    parallel_for(stories.size(), cfg.service.jobs, [&](size_t i) {
        const auto& s = stories[i];
        corpus::Article stub;
        stub.id = s.article_id;
        for (int m = 0; m < 2; ++m) {
            std::map<std::string, std::string> bindings{{"story", s.phrases},
                                                        {"article", ""}};
            auto raw = extraction::extract(stub, prompts[m], bindings, cfg.service, cache);
            auto parsed =
                extraction::parse_and_validate(raw, extraction::prompt_registry(prompts[m]));
            if (!parsed.records.empty()) ratings[i][m] = parsed.records.front().at("Rating");
        }
    });

    std::string tsv = "article_id\tentity\tmetric\trating\n";
    long long rows = 0;
    for (size_t i = 0; i < stories.size(); ++i) {
        for (int m = 0; m < 2; ++m) {
            if (ratings[i][m].empty()) continue;
            tsv += stories[i].article_id + "\t" + stories[i].entity + "\t" + metric_names[m] +
                   "\t" + ratings[i][m] + "\n";
            ++rows;
        }
    }
    io::write_file_atomic(staged_heart(cfg), tsv);
    manifest.record_counts["stories"] = static_cast<long long>(stories.size());
    manifest.record_counts["ratings"] = rows;
    return 0;
}

// Doubt-phrase discovery: runs the discovery prompt over casualty-related CVN
// sentences and stages the candidate phrases. Discovery feeds lexicon
// curation by hand; the tallies always count the fixed lexicon file.
int cmd_extract_doubt(const Config& cfg, ManifestWriter& manifest) {
    fs::path store_path = require_store({}, staged_cvn(cfg), "extract cvn");
    manifest.add_input("cvn", store_path);
    auto store = cvn::load_cvn_store(store_path);
    cvn::CategoryRules rules = cfg.category_rules_path.empty()
                                   ? cvn::CategoryRules::defaults()
                                   : cvn::CategoryRules::load(cfg.category_rules_path);
    std::vector<const cvn::CvnRecord*> casualty;
    for (const auto& r : store.records)
        if (cvn::map_category(r.statistics_type, rules) == cvn::CvnCategory::Casualties)
            casualty.push_back(&r);

    extraction::ExtractionCache cache(cfg.cache_dir);
    const auto& tpl = extraction::prompt_registry(extraction::PromptId::CvnDoubt);
    std::vector<std::vector<extraction::RecordFields>> found(casualty.size());
    parallel_for(casualty.size(), cfg.service.jobs, [&](size_t i) {
        corpus::Article stub;
        stub.id = casualty[i]->article_id;
        std::map<std::string, std::string> bindings{{"sentence", casualty[i]->sentence},
                                                    {"article", ""}};
        auto raw = extraction::extract(stub, extraction::PromptId::CvnDoubt, bindings,
                                       cfg.service, cache);
        found[i] = extraction::parse_and_validate(raw, tpl).records;
    });

    std::string jsonl;
    long long candidates = 0;
    for (size_t i = 0; i < casualty.size(); ++i) {
        for (const auto& f : found[i]) {
            nlohmann::json j;
            j["article_id"] = casualty[i]->article_id;
            j["outlet"] = casualty[i]->outlet;
            for (const auto& [k, v] : f) j[k] = v;
            jsonl += j.dump();
            jsonl.push_back('\n');
            ++candidates;
        }
    }
    io::write_file_atomic(cfg.out_dir / "extractions" / "doubt_candidates.jsonl", jsonl);
    manifest.record_counts["casualty_sentences"] = static_cast<long long>(casualty.size());
    manifest.record_counts["candidate_phrases"] = candidates;
    return 0;
}

int cmd_extract(const Config& cfg, const std::string& family) {
    ManifestWriter manifest{cfg, "extract_" + family};
    int rc;
    if (family == "instances")
        rc = cmd_extract_instances(cfg, manifest);
    else if (family == "hardship")
        rc = cmd_extract_hardship(cfg, manifest);
    else if (family == "child")
        rc = cmd_extract_child(cfg, manifest);
    else if (family == "cvn")
        rc = cmd_extract_cvn(cfg, manifest);
    else if (family == "citation")
        rc = cmd_extract_citation(cfg, manifest);
    else if (family == "heart")
        rc = cmd_extract_heart(cfg, manifest);
    else if (family == "doubt")
        rc = cmd_extract_doubt(cfg, manifest);
    else
        throw ConfigError("unknown prompt family: " + family +
                          " (expected instances|hardship|child|cvn|citation|heart|doubt)");
    manifest.write();
    return rc;
}

// ---------------------------------------------------------------------------
// analyze individualization

std::vector<instances::InstanceRecord> load_instances_for_analysis(const Config& cfg,
                                                                   ManifestWriter& manifest) {
    fs::path path =
        require_store(cfg.instances_path, staged_instances(cfg), "extract instances");
    manifest.add_input("instances", path);
    auto store = instances::load_instance_store(path);
    if (!store.rejections.empty())
        throw InputError("instance store line " +
                         std::to_string(store.rejections.front().line_number) + ": " +
                         store.rejections.front().reason);
    return std::move(store.records);
}

// Individualized records that pass every story predicate except primacy,
// deduplicated like the story filter; used for the secondary/primary ratios.
instances::PrimacyCounts primacy_counts(const std::vector<instances::InstanceRecord>& records) {
    instances::PrimacyCounts out;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& r : records) {
        if (r.type != instances::InstanceType::Individualized) continue;
        if (r.side != Side::Palestine && r.side != Side::Israel) continue;
        if (r.location != instances::Location::Gaza &&
            r.location != instances::Location::Israel)
            continue;
        if (r.civilian_status != instances::CivilianStatus::Civilian) continue;
        if (r.primary == instances::YesNoNA::NA) continue;
        if (!seen.insert({r.article_id, str::normalize_key(r.entity)}).second) continue;
        bool primary = r.primary == instances::YesNoNA::Yes;
        if (r.side == Side::Israel)
            (primary ? out.primary_israel : out.secondary_israel) += 1;
        else
            (primary ? out.primary_palestine : out.secondary_palestine) += 1;
    }
    return out;
}

int cmd_analyze_individualization(const Config& cfg) {
    ManifestWriter manifest{cfg, "analyze_individualization"};
    auto records = load_instances_for_analysis(cfg, manifest);
    auto stories = instances::filter_individualized_stories(records);

    // I/G table over stories plus side-valid grouped records
    std::vector<instances::InstanceRecord> universe = stories;
    for (const auto& r : records)
        if (r.type == instances::InstanceType::Grouped &&
            (r.side == Side::Palestine || r.side == Side::Israel))
            universe.push_back(r);
    auto ig = instances::ig_ratio_table(universe);

    std::string csv = "source,side,individual,group,ratio,ratio_full\n";
    std::set<std::string> outlets;
    for (const auto& [key, cell] : ig.cells) outlets.insert(key.first);
    for (const auto& outlet : outlets) {
        for (Side side : {Side::Palestine, Side::Israel}) {
            auto it = ig.cells.find({outlet, side});
            if (it == ig.cells.end()) continue;
            auto ratio = it->second.ratio();
            csv += io::csv_row({outlet, side_name(side),
                                std::to_string(it->second.individual_count),
                                std::to_string(it->second.group_count),
                                ratio ? format_fixed(*ratio, 2) : "",
                                ratio ? num(*ratio) : ""});
        }
    }
    io::write_file_atomic(cfg.out_dir / "tables" / "ig_ratio.csv", csv);

    // GEE per outlet: outcome 1 = individualized story, 0 = grouped mention
    std::string fits_txt;
    std::string gee_csv =
        "source,intercept,beta_side,robust_se,odds_ratio,odds_pct_change,wald_z,p_value,"
        "rho_hat,iterations,converged,significant\n";
    for (const auto& outlet : outlets) {
        stats::GeeDesign design;
        for (const auto& r : universe) {
            if (r.outlet != outlet) continue;
            design.observations.push_back(
                {r.article_id, r.type == instances::InstanceType::Individualized ? 1 : 0,
                 r.side == Side::Palestine ? 1 : 0});
        }
        if (design.observations.empty()) continue;
        auto fit = stats::fit_gee_logistic(design);
        fits_txt += stats::serialize_fit("individualization_" + outlet, fit);
        fits_txt += "\n";
        bool significant = fit.converged && fit.p_value < cfg.alpha;
        gee_csv += io::csv_row({outlet, num(fit.intercept), num(fit.beta_side),
                                num(fit.robust_se), num(fit.odds_ratio),
                                num(stats::odds_percent_change(fit.beta_side)), num(fit.wald_z),
                                num(fit.p_value), num(fit.rho_hat),
                                std::to_string(fit.iterations_used),
                                fit.converged ? "true" : "false",
                                significant ? "true" : "false"});
    }
    io::write_file_atomic(cfg.out_dir / "tables" / "gee_fits.txt", fits_txt);
    io::write_file_atomic(cfg.out_dir / "tables" / "gee_summary.csv", gee_csv);

    // secondary/primary ratios and Cohen's h
    auto counts = primacy_counts(records);
    auto sp = instances::secondary_primary_ratio(counts);
    std::string sp_csv = "side,primary,secondary,ratio,ratio_full\n";
    sp_csv += io::csv_row({"Israel", std::to_string(counts.primary_israel),
                           std::to_string(counts.secondary_israel),
                           sp.ratio_israel ? format_fixed(*sp.ratio_israel, 2) : "",
                           opt_num(sp.ratio_israel)});
    sp_csv += io::csv_row({"Palestine", std::to_string(counts.primary_palestine),
                           std::to_string(counts.secondary_palestine),
                           sp.ratio_palestine ? format_fixed(*sp.ratio_palestine, 2) : "",
                           opt_num(sp.ratio_palestine)});
    io::write_file_atomic(cfg.out_dir / "tables" / "secondary_primary.csv", sp_csv);

    std::string effects = "name,value,value_full\n";
    if (sp.cohens_h)
        effects += io::csv_row({"secondary_primary_cohens_h", format_fixed(*sp.cohens_h, 2),
                                num(*sp.cohens_h)});
    io::write_file_atomic(cfg.out_dir / "tables" / "effect_sizes.csv", effects);

    // Oct-7 share of Israeli casualty stories in Western outlets
    std::string oct7_csv = "scope,stories,oct7_yes,share,share_full\n";
    auto oct7_row = [&](const std::string& scope,
                        const std::vector<instances::InstanceRecord>& subset) {
        long long yes = 0;
        for (const auto& s : subset)
            if (s.oct7_related && *s.oct7_related) ++yes;
        auto share = instances::oct7_share(subset);
        oct7_csv += io::csv_row({scope, std::to_string(subset.size()), std::to_string(yes),
                                 share ? format_fixed(100.0 * *share, 0) : "",
                                 opt_num(share)});
    };
    std::vector<instances::InstanceRecord> western_all;
    for (const auto& outlet : cfg.western_outlets) {
        std::vector<instances::InstanceRecord> subset;
        for (const auto& s : stories)
            if (s.outlet == outlet && s.side == Side::Israel && s.hardship &&
                *s.hardship == instances::Hardship::Casualties)
                subset.push_back(s);
        western_all.insert(western_all.end(), subset.begin(), subset.end());
        oct7_row(outlet, subset);
    }
    oct7_row("western_combined", western_all);
    io::write_file_atomic(cfg.out_dir / "tables" / "oct7_share.csv", oct7_csv);

    // child shares
    auto shares = instances::child_shares(stories, cfg.child_deaths);
    std::string child_csv =
        "source,side,child_stories,total_stories,pct_child,child_dist_pct,"
        "deaths_children,deaths_total,pct_children_deaths,deaths_dist_pct\n";
    std::set<std::string> child_outlets;
    for (const auto& [key, cell] : shares.by_outlet_side) child_outlets.insert(key.first);
    const auto& d = shares.deaths;
    double death_pct_p = 100.0 * d.children_palestine / std::max(1LL, d.total_palestine);
    double death_pct_i = 100.0 * d.children_israel / std::max(1LL, d.total_israel);
    long long child_deaths_total = d.children_palestine + d.children_israel;
    double death_dist_p = 100.0 * d.children_palestine / std::max(1LL, child_deaths_total);
    double death_dist_i = 100.0 * d.children_israel / std::max(1LL, child_deaths_total);
    for (const auto& outlet : child_outlets) {
        instances::ChildShareCell cells[2];
        auto itp = shares.by_outlet_side.find({outlet, Side::Palestine});
        auto iti = shares.by_outlet_side.find({outlet, Side::Israel});
        if (itp != shares.by_outlet_side.end()) cells[0] = itp->second;
        if (iti != shares.by_outlet_side.end()) cells[1] = iti->second;
        long long child_total = cells[0].child_stories + cells[1].child_stories;
        auto emit = [&](const char* side, const instances::ChildShareCell& c,
                        long long deaths_children, long long deaths_all, double dp,
                        double dd) {
            double pct = c.total_stories ? 100.0 * c.child_stories / c.total_stories : 0.0;
            double dist = child_total ? 100.0 * c.child_stories / child_total : 0.0;
            child_csv += io::csv_row(
                {outlet, side, std::to_string(c.child_stories),
                 std::to_string(c.total_stories), format_fixed(pct, 0), format_fixed(dist, 0),
                 std::to_string(deaths_children), std::to_string(deaths_all),
                 format_fixed(dp, 1), format_fixed(dd, 1)});
        };
        emit("Palestine", cells[0], d.children_palestine, d.total_palestine, death_pct_p,
             death_dist_p);
        emit("Israel", cells[1], d.children_israel, d.total_israel, death_pct_i, death_dist_i);
        instances::ChildShareCell both{cells[0].child_stories + cells[1].child_stories,
                                       cells[0].total_stories + cells[1].total_stories};
        emit("Both", both, child_deaths_total, d.total_palestine + d.total_israel,
             100.0 * child_deaths_total / std::max(1LL, d.total_palestine + d.total_israel),
             100.0);
    }
    io::write_file_atomic(cfg.out_dir / "tables" / "child_shares.csv", child_csv);

    manifest.record_counts["records"] = static_cast<long long>(records.size());
    manifest.record_counts["stories"] = static_cast<long long>(stories.size());
    // individualized mentions removed by the civilian predicate alone
    long long non_civilian = 0;
    for (const auto& r : records)
        if (r.type == instances::InstanceType::Individualized &&
            r.civilian_status != instances::CivilianStatus::Civilian)
            ++non_civilian;
    manifest.record_counts["individualized_non_civilian_dropped"] = non_civilian;
    manifest.write();
    return 0;
}

// ---------------------------------------------------------------------------
// analyze cvn

std::vector<cvn::CvnRecord> load_cvns_for_analysis(const Config& cfg,
                                                   ManifestWriter& manifest) {
    fs::path path = require_store(cfg.cvn_path, staged_cvn(cfg), "extract cvn");
    manifest.add_input("cvn", path);
    auto store = cvn::load_cvn_store(path);
    if (!store.rejections.empty())
        throw InputError("cvn store line " +
                         std::to_string(store.rejections.front().line_number) + ": " +
                         store.rejections.front().reason);
    return std::move(store.records);
}

int cmd_analyze_cvn(const Config& cfg) {
    ManifestWriter manifest{cfg, "analyze_cvn"};
    auto records = load_cvns_for_analysis(cfg, manifest);
    auto filtered = cvn::filter_cvns(records);

    cvn::CategoryRules rules;
    if (!cfg.category_rules_path.empty()) {
        manifest.add_input("category_rules", cfg.category_rules_path);
        rules = cvn::CategoryRules::load(cfg.category_rules_path);
    } else {
        rules = cvn::CategoryRules::defaults();
    }
    for (auto& r : filtered) r.category = cvn::map_category(r.statistics_type, rules);

    // category distribution (per outlet and side, share of the side's total)
    std::map<std::string, std::map<Side, std::map<cvn::CvnCategory, long long>>> dist;
    std::map<std::string, std::map<Side, long long>> side_totals;
    for (const auto& r : filtered) {
        dist[r.outlet][r.side][*r.category] += 1;
        side_totals[r.outlet][r.side] += 1;
    }
    std::string cat_csv = "source,side,category,mentions,percent,percent_full\n";
    for (const auto& [outlet, sides] : dist) {
        for (Side side : {Side::Palestine, Side::Israel}) {
            auto its = sides.find(side);
            if (its == sides.end()) continue;
            long long total = side_totals[outlet][side];
            // highest counts first, mirroring the distribution tables
            std::vector<std::pair<cvn::CvnCategory, long long>> rows(its->second.begin(),
                                                                     its->second.end());
            std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
                if (a.second != b.second) return a.second > b.second;
                return static_cast<int>(a.first) < static_cast<int>(b.first);
            });
            for (const auto& [cat, count] : rows) {
                double pct = 100.0 * static_cast<double>(count) / static_cast<double>(total);
                cat_csv += io::csv_row({outlet, side_name(side), cvn::category_name(cat),
                                        std::to_string(count), format_fixed(pct, 1),
                                        num(pct)});
            }
        }
    }
    io::write_file_atomic(cfg.out_dir / "tables" / "cvn_categories.csv", cat_csv);

    // citation stats
    auto cites = cvn::citation_stats(filtered);
    std::string cite_csv = "source,side,cited,total,percent,percent_full\n";
    std::set<std::string> outlets;
    for (const auto& [key, cell] : cites.cells) outlets.insert(key.first);
    for (const auto& outlet : outlets) {
        for (Side side : {Side::Palestine, Side::Israel}) {
            auto it = cites.cells.find({outlet, side});
            if (it == cites.cells.end()) continue;
            auto pct = it->second.percent();
            cite_csv += io::csv_row({outlet, side_name(side),
                                     std::to_string(it->second.cited_count),
                                     std::to_string(it->second.total),
                                     pct ? format_fixed(*pct, 1) : "", opt_num(pct)});
        }
    }
    io::write_file_atomic(cfg.out_dir / "tables" / "citation_stats.csv", cite_csv);
    std::string ratio_csv = "source,ratio,ratio_full\n";
    for (const auto& outlet : outlets) {
        auto ratio = cites.ratio(outlet);
        ratio_csv += io::csv_row(
            {outlet, ratio ? format_fixed(*ratio, 1) : "", opt_num(ratio)});
    }
    io::write_file_atomic(cfg.out_dir / "tables" / "citation_ratio.csv", ratio_csv);

    // doubt-casting analysis over casualty-category sentences
    if (cfg.lexicon_path.empty()) throw ConfigError("lexicon_path not configured");
    manifest.add_input("lexicon", cfg.lexicon_path);
    auto lexicon = cvn::DoubtLexicon::load(cfg.lexicon_path);
    std::vector<cvn::CvnRecord> casualty;
    for (const auto& r : filtered)
        if (r.category == cvn::CvnCategory::Casualties) casualty.push_back(r);
    auto tally = cvn::doubt_tally(casualty, lexicon);

    std::string tally_csv =
        "source,total,palestinian,israeli,source_doubting_pal,source_doubting_isr,"
        "uncertainty_pal,uncertainty_isr\n";
    for (const auto& [outlet, per] : tally.outlets) {
        tally_csv += io::csv_row(
            {outlet, std::to_string(per.total), std::to_string(per.by_side[0]),
             std::to_string(per.by_side[1]), std::to_string(per.by_category_side[0][0]),
             std::to_string(per.by_category_side[0][1]),
             std::to_string(per.by_category_side[1][0]),
             std::to_string(per.by_category_side[1][1])});
    }
    io::write_file_atomic(cfg.out_dir / "tables" / "doubt_tally.csv", tally_csv);

    for (const auto& [outlet, per] : tally.outlets) {
        std::string phrase_csv = "phrase,total,palestinian,israeli\n";
        for (const auto& e : lexicon.entries) {
            auto it = per.by_phrase.find(e.phrase);
            cvn::DoubtTally::PhraseRow row;
            if (it != per.by_phrase.end()) row = it->second;
            phrase_csv += io::csv_row({e.phrase, std::to_string(row.total),
                                       std::to_string(row.palestine),
                                       std::to_string(row.israel)});
        }
        phrase_csv += io::csv_row({"TOTAL", std::to_string(per.total),
                                   std::to_string(per.by_side[0]),
                                   std::to_string(per.by_side[1])});
        io::write_file_atomic(cfg.out_dir / "tables" / ("doubt_phrases_" + outlet + ".csv"),
                              phrase_csv);
    }

    manifest.record_counts["cvns"] = static_cast<long long>(records.size());
    manifest.record_counts["filtered"] = static_cast<long long>(filtered.size());
    manifest.record_counts["casualty_sentences"] = static_cast<long long>(casualty.size());
    manifest.write();
    return 0;
}

// ---------------------------------------------------------------------------
// analyze baseline

int cmd_analyze_baseline(const Config& cfg) {
    ManifestWriter manifest{cfg, "analyze_baseline"};
    if (cfg.weekly_casualties_path.empty())
        throw ConfigError("weekly_casualties_path not configured");
    manifest.add_input("weekly_casualties", cfg.weekly_casualties_path);
    auto casualties = corpus::CasualtySeries::load_weekly(cfg.weekly_casualties_path, cfg.window);
    const int weeks = cfg.window.num_weeks();

    // weekly casualty-related mention counts per outlet
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> mentions;
    if (!cfg.baseline_mentions_path.empty()) {
        manifest.add_input("baseline_mentions", cfg.baseline_mentions_path);
        auto rows = io::read_tsv(cfg.baseline_mentions_path);
        for (size_t i = 1; i < rows.size(); ++i) {
            const auto& row = rows[i];
            if (row.size() != 4)
                throw InputError("baseline mentions row " + std::to_string(i + 1) +
                                 ": expected 4 columns (outlet, week_index, m_p, m_i)");
            auto& series = mentions[row[0]];
            if (series.first.empty()) {
                series.first.assign(weeks, 0.0);
                series.second.assign(weeks, 0.0);
            }
            int w = std::stoi(row[1]);
            if (w < 0 || w >= weeks)
                throw InputError("baseline mentions week_index out of range: " + row[1]);
            series.first[w] = std::stod(row[2]);
            series.second[w] = std::stod(row[3]);
        }
    } else {
        auto records = load_cvns_for_analysis(cfg, manifest);
        auto filtered = cvn::filter_cvns(records);
        cvn::CategoryRules rules = cfg.category_rules_path.empty()
                                       ? cvn::CategoryRules::defaults()
                                       : cvn::CategoryRules::load(cfg.category_rules_path);
        for (const auto& r : filtered) {
            if (cvn::map_category(r.statistics_type, rules) != cvn::CvnCategory::Casualties)
                continue;
            if (!cfg.window.contains(r.published_at))
                throw InputError("cvn record outside study window: " + r.article_id);
            auto& series = mentions[r.outlet];
            if (series.first.empty()) {
                series.first.assign(weeks, 0.0);
                series.second.assign(weeks, 0.0);
            }
            int w = cfg.window.week_index(r.published_at);
            (r.side == Side::Palestine ? series.first[w] : series.second[w]) += 1.0;
        }
    }

    std::string summary_csv = "outlet,mean_delta_p,weeks_defined\n";
    for (const auto& [outlet, series] : mentions) {
        baseline::BaselineInputs inputs;
        inputs.mentions_p = series.first;
        inputs.mentions_i = series.second;
        inputs.casualties_p.assign(casualties.deaths_palestine.begin(),
                                   casualties.deaths_palestine.end());
        inputs.casualties_i.assign(casualties.deaths_israel.begin(),
                                   casualties.deaths_israel.end());
        auto out = baseline::expected_series(inputs, cfg.baseline_params);

        std::string csv =
            "outlet,week_index,r,S_p,S_i,G_p,G_i,w_p,M_prime_p,M_prime_i,delta_p_gap\n";
        for (int t = 0; t < weeks; ++t) {
            csv += io::csv_row({outlet, std::to_string(t), opt_num(out.r[t]),
                                num(out.spike_p[t]), num(out.spike_i[t]), num(out.g_p[t]),
                                num(out.g_i[t]), opt_num(out.w_p[t]), num(out.m_prime_p[t]),
                                num(out.m_prime_i[t]), opt_num(out.gap_p[t])});
        }
        io::write_file_atomic(cfg.out_dir / "series" / ("baseline_" + outlet + ".csv"), csv);

        auto mean_gap = baseline::gap_summary(out);
        int defined = 0;
        for (const auto& g : out.gap_p)
            if (g) ++defined;
        summary_csv +=
            io::csv_row({outlet, opt_num(mean_gap), std::to_string(defined)});
    }
    io::write_file_atomic(cfg.out_dir / "tables" / "baseline_gap_summary.csv", summary_csv);

    manifest.record_counts["outlets"] = static_cast<long long>(mentions.size());
    manifest.write();
    return 0;
}

// ---------------------------------------------------------------------------
// analyze heart

int cmd_analyze_heart(const Config& cfg) {
    ManifestWriter manifest{cfg, "analyze_heart"};
    fs::path scores_path = require_store(cfg.heart_scores_path, staged_heart(cfg), "extract heart");
    manifest.add_input("heart_scores", scores_path);
    auto loaded = heart::load_scores(scores_path);
    if (!loaded.rejections.empty())
        throw InputError("heart scores line " +
                         std::to_string(loaded.rejections.front().line_number) + ": " +
                         loaded.rejections.front().reason);

    auto records = load_instances_for_analysis(cfg, manifest);
    auto stories = instances::filter_individualized_stories(records);
    std::map<std::pair<std::string, std::string>, const instances::InstanceRecord*> by_story;
    for (const auto& s : stories) by_story[{s.article_id, str::normalize_key(s.entity)}] = &s;

    heart::SideLookup lookup = [&](const std::string& article_id,
                                   const std::string& entity) -> std::optional<Side> {
        auto it = by_story.find({article_id, str::normalize_key(entity)});
        if (it == by_story.end()) return std::nullopt;
        return it->second->side;
    };

    // group scores per article; outlet and date come from any story of the article
    std::map<std::string, std::vector<heart::Score>> per_article;
    for (const auto& s : loaded.scores) per_article[s.article_id].push_back(s);
    std::map<std::string, std::pair<std::string, Date>> article_meta;
    for (const auto& s : stories) article_meta[s.article_id] = {s.outlet, s.published_at};

    std::vector<heart::ArticleDiff> diffs;
    for (const auto& [article_id, scores] : per_article) {
        auto meta = article_meta.find(article_id);
        if (meta == article_meta.end())
            throw InputError("heart scores reference unknown article: " + article_id);
        auto article_diffs = heart::aggregate_article(article_id, meta->second.first,
                                                      meta->second.second, scores, lookup);
        diffs.insert(diffs.end(), article_diffs.begin(), article_diffs.end());
    }

    auto series = heart::diff_series(diffs, cfg.window);
    std::string csv = "outlet,metric,week_index,mean_diff\n";
    for (const auto& [key, weeks] : series)
        for (const auto& [week, mc] : weeks)
            csv += io::csv_row(
                {key.first, heart::metric_name(key.second), std::to_string(week), num(mc.mean)});
    io::write_file_atomic(cfg.out_dir / "series" / "heart_diffs.csv", csv);

    manifest.record_counts["scores"] = static_cast<long long>(loaded.scores.size());
    manifest.record_counts["article_diffs"] = static_cast<long long>(diffs.size());
    manifest.write();
    return 0;
}

// ---------------------------------------------------------------------------
// analyze dates

int cmd_analyze_dates(const Config& cfg) {
    ManifestWriter manifest{cfg, "analyze_dates"};
    fs::path catalog_path = cfg.date_side == Side::Palestine ? cfg.events_palestine_path
                                                             : cfg.events_israel_path;
    if (catalog_path.empty()) throw ConfigError("event catalog path not configured");
    manifest.add_input("event_catalog", catalog_path);
    auto catalog = corpus::EventCatalog::load(catalog_path, cfg.window).restricted_to(cfg.date_side);
    auto dates = corpus::select_analysis_dates(catalog, cfg.window, cfg.date_params);

    std::string dates_csv = "slot,date\n";
    for (size_t i = 0; i < dates.size(); ++i)
        dates_csv += io::csv_row({std::to_string(i + 1), dates[i].to_string()});
    io::write_file_atomic(cfg.out_dir / "tables" / "analysis_dates.csv", dates_csv);

    auto records = load_instances_for_analysis(cfg, manifest);
    auto stories = instances::filter_individualized_stories(records);
    // Palestinian stories count as-is; Israeli counts follow the Oct-7 framing
    std::vector<instances::InstanceRecord> qualifying;
    for (const auto& s : stories) {
        if (s.side == Side::Palestine)
            qualifying.push_back(s);
        else if (s.side == Side::Israel && s.oct7_related && *s.oct7_related)
            qualifying.push_back(s);
    }
    auto counts = instances::story_events_on_dates(qualifying, dates, 1);
    std::string counts_csv = "outlet,date,palestinian_stories,israeli_stories\n";
    for (const auto& [outlet, per_date] : counts) {
        for (const auto& d : dates) {
            long long pal = 0, isr = 0;
            auto it = per_date.find(d);
            if (it != per_date.end()) {
                auto p = it->second.find(Side::Palestine);
                if (p != it->second.end()) pal = p->second;
                auto i = it->second.find(Side::Israel);
                if (i != it->second.end()) isr = i->second;
            }
            counts_csv += io::csv_row(
                {outlet, d.to_string(), std::to_string(pal), std::to_string(isr)});
        }
    }
    io::write_file_atomic(cfg.out_dir / "tables" / "date_story_counts.csv", counts_csv);

    // lagged deaths/stories correlation when daily deaths are available
    if (!cfg.daily_deaths_path.empty()) {
        manifest.add_input("daily_deaths", cfg.daily_deaths_path);
        corpus::CasualtySeries daily;
        daily.load_daily(cfg.daily_deaths_path, cfg.window);
        long long days = (cfg.window.end - cfg.window.start) + 1;
        std::vector<double> deaths(days, 0.0), story_counts(days, 0.0);
        for (const auto& [date, dp] : daily.daily_deaths)
            deaths[date - cfg.window.start] = static_cast<double>(dp.first);
        for (const auto& s : stories) {
            if (s.side != Side::Israel || !s.oct7_related || !*s.oct7_related) continue;
            story_counts[s.published_at - cfg.window.start] += 1.0;
        }
        auto r = stats::lagged_story_correlation(deaths, story_counts, 1,
                                                 cfg.day_filter_threshold);
        std::string corr_csv = "threshold,lag_days,pearson_r\n";
        corr_csv += io::csv_row({num(cfg.day_filter_threshold), "1", opt_num(r)});
        io::write_file_atomic(cfg.out_dir / "tables" / "lagged_correlation.csv", corr_csv);
    }

    manifest.record_counts["admissible_events"] = static_cast<long long>(catalog.events.size());
    manifest.record_counts["selected_dates"] = static_cast<long long>(dates.size());
    manifest.write();
    return 0;
}

// ---------------------------------------------------------------------------
// report

int cmd_report(const Config& cfg) {
    ManifestWriter manifest{cfg, "report"};
    fs::path report_dir = cfg.out_dir / "report";
    fs::create_directories(report_dir);

    std::vector<std::pair<std::string, fs::path>> artifacts;
    for (const char* sub : {"tables", "series"}) {
        fs::path dir = cfg.out_dir / sub;
        if (!fs::exists(dir)) continue;
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_regular_file()) files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files)
            artifacts.emplace_back(std::string(sub) + "/" + f.filename().string(), f);
    }
    std::string index_csv = "path,sha256,bytes\n";
    for (const auto& [rel, path] : artifacts) {
        std::string content = io::read_file(path);
        fs::path dest = report_dir / rel;
        io::write_file_atomic(dest, content);
        index_csv += io::csv_row({rel, sha256_hex(content), std::to_string(content.size())});
    }
    io::write_file_atomic(report_dir / "index.csv", index_csv);

    manifest.record_counts["artifacts"] = static_cast<long long>(artifacts.size());
    manifest.write();
    return 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// config

Config Config::load(const fs::path& path) {
    Config cfg;
    cfg.config_path = path;
    std::string text = io::read_file(path);
    cfg.config_hash = sha256_hex(text);
    fs::path base = path.parent_path();

    size_t line_no = 0;
    for (const auto& raw_line : str::split(text, '\n')) {
        ++line_no;
        std::string line = str::trim(raw_line);
        if (line.empty() || line[0] == '#') continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        std::string key = str::trim(line.substr(0, eq));
        std::string value = str::trim(line.substr(eq + 1));

        if (key == "corpus_path") cfg.corpus_path = resolve(base, value);
        else if (key == "window_start") {
            auto d = Date::parse(value);
            if (!d) throw ConfigError("bad window_start: " + value);
            cfg.window.start = cfg.window.week_anchor = *d;
        } else if (key == "window_end") {
            auto d = Date::parse(value);
            if (!d) throw ConfigError("bad window_end: " + value);
            cfg.window.end = *d;
        } else if (key == "out_dir") cfg.out_dir = resolve(base, value);
        else if (key == "cache_dir") cfg.cache_dir = resolve(base, value);
        else if (key == "service_endpoint") cfg.service.endpoint = value;
        else if (key == "service_model") cfg.service.model = value;
        else if (key == "service_temperature") cfg.service.temperature = std::stod(value);
        else if (key == "service_api_token") cfg.service.api_token = value;
        else if (key == "service_max_attempts") cfg.service.max_attempts = std::stoi(value);
        else if (key == "service_backoff_ms") cfg.service.backoff_initial_ms = std::stoi(value);
        else if (key == "service_timeout_sec") cfg.service.timeout_sec = std::stoi(value);
        else if (key == "max_prompt_chars")
            cfg.service.max_prompt_chars = static_cast<size_t>(std::stoull(value));
        else if (key == "lexicon_path") cfg.lexicon_path = resolve(base, value);
        else if (key == "category_rules_path") cfg.category_rules_path = resolve(base, value);
        else if (key == "events_palestine_path")
            cfg.events_palestine_path = resolve(base, value);
        else if (key == "events_israel_path") cfg.events_israel_path = resolve(base, value);
        else if (key == "weekly_casualties_path")
            cfg.weekly_casualties_path = resolve(base, value);
        else if (key == "daily_deaths_path") cfg.daily_deaths_path = resolve(base, value);
        else if (key == "instances_path") cfg.instances_path = resolve(base, value);
        else if (key == "cvn_path") cfg.cvn_path = resolve(base, value);
        else if (key == "heart_scores_path") cfg.heart_scores_path = resolve(base, value);
        else if (key == "baseline_mentions_path")
            cfg.baseline_mentions_path = resolve(base, value);
        else if (key == "baseline_delta_p") cfg.baseline_params.delta_p = std::stod(value);
        else if (key == "baseline_delta_i") cfg.baseline_params.delta_i = std::stod(value);
        else if (key == "baseline_spike_multiplier")
            cfg.baseline_params.spike_multiplier = std::stod(value);
        else if (key == "baseline_spike_threshold")
            cfg.baseline_params.spike_threshold_ratio = std::stod(value);
        else if (key == "baseline_spike_at_origin")
            cfg.baseline_params.spike_at_origin = parse_bool(value);
        else if (key == "baseline_g_uses_casualties")
            cfg.baseline_params.g_uses_casualties = parse_bool(value);
        else if (key == "day_filter_threshold") cfg.day_filter_threshold = std::stod(value);
        else if (key == "date_exclusion_head_days")
            cfg.date_params.exclusion_head_days = std::stoll(value);
        else if (key == "date_exclusion_tail_days")
            cfg.date_params.exclusion_tail_days = std::stoll(value);
        else if (key == "date_k") cfg.date_params.k = std::stoi(value);
        else if (key == "date_tolerance_min_days")
            cfg.date_params.tolerance_min_days = std::stoll(value);
        else if (key == "date_tolerance_max_days")
            cfg.date_params.tolerance_max_days = std::stoll(value);
        else if (key == "date_side") {
            auto s = parse_side(value);
            if (!s) throw ConfigError("bad date_side: " + value);
            cfg.date_side = *s;
        } else if (key == "child_deaths_palestine")
            cfg.child_deaths.children_palestine = std::stoll(value);
        else if (key == "child_total_palestine")
            cfg.child_deaths.total_palestine = std::stoll(value);
        else if (key == "child_deaths_israel")
            cfg.child_deaths.children_israel = std::stoll(value);
        else if (key == "child_total_israel") cfg.child_deaths.total_israel = std::stoll(value);
        else if (key == "western_outlets") {
            cfg.western_outlets.clear();
            for (auto& o : str::split(value, ','))
                if (!str::trim(o).empty()) cfg.western_outlets.push_back(str::trim(o));
        } else if (key == "alpha") cfg.alpha = std::stod(value);
        else
            throw ConfigError("unknown config key: " + key);
    }
    if (!(cfg.window.start < cfg.window.end))
        throw ConfigError("study window start must precede end");
    cfg.service.apply_env_overrides();
    return cfg;
}

int run_command(const std::vector<std::string>& args) {
    CLI::App app{"newslens: conflict news coverage analysis pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir_override;
    int jobs = 0;
    bool offline = false;
    std::string family;
    std::string what;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "configuration file")->required();
        sub->add_option("--out-dir", out_dir_override, "output directory override");
        sub->add_option("--jobs", jobs, "max in-flight service calls");
        sub->add_flag("--offline", offline, "forbid network; fail on cache misses");
    };
    CLI::App* ingest = app.add_subcommand("ingest", "load, filter and bucket the corpus");
    add_common(ingest);
    CLI::App* extract = app.add_subcommand("extract", "run a prompt family via the service");
    extract->add_option("family", family, "instances|hardship|child|cvn|citation|heart|doubt")
        ->required();
    add_common(extract);
    CLI::App* analyze = app.add_subcommand("analyze", "compute analysis tables");
    analyze->add_option("what", what, "individualization|cvn|baseline|heart|dates")->required();
    add_common(analyze);
    CLI::App* report = app.add_subcommand("report", "bundle artifacts with an index");
    add_common(report);

    std::vector<const char*> argv;
    argv.push_back("newslens");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        Config cfg = Config::load(config_path);
        if (!out_dir_override.empty()) cfg.out_dir = fs::path(out_dir_override);
        if (jobs > 0) cfg.service.jobs = jobs;
        if (offline) cfg.service.offline = true;

        if (ingest->parsed()) return cmd_ingest(cfg);
        if (extract->parsed()) return cmd_extract(cfg, family);
        if (analyze->parsed()) {
            if (what == "individualization") return cmd_analyze_individualization(cfg);
            if (what == "cvn") return cmd_analyze_cvn(cfg);
            if (what == "baseline") return cmd_analyze_baseline(cfg);
            if (what == "heart") return cmd_analyze_heart(cfg);
            if (what == "dates") return cmd_analyze_dates(cfg);
            std::cerr << "unknown analysis: " << what << "\n" << app.help() << "\n";
            return 1;
        }
        if (report->parsed()) return cmd_report(cfg);
        std::cerr << app.help() << "\n";
        return 1;
    } catch (const PrerequisiteError& e) {
        std::cerr << "newslens: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "newslens: " << e.what() << "\n";
        return 2;
    } catch (const InputError& e) {
        std::cerr << "newslens: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "newslens: " << e.what() << "\n";
        return 4;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_command(args);
}

}  // namespace newslens::cli
