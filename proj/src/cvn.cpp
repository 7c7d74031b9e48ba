#include "newslens/cvn.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <set>

#include <nlohmann/json.hpp>

#include "newslens/io.hpp"

using json = nlohmann::json;

namespace newslens::cvn {

const char* group_size_name(GroupSize g) {
    switch (g) {
        case GroupSize::Singular: return "Singular";
        case GroupSize::Double: return "Double";
        case GroupSize::Many: return "Many";
        case GroupSize::NotApplicable: return "Not_Applicable";
    }
    return "Not_Applicable";
}

const char* category_name(CvnCategory c) {
    switch (c) {
        case CvnCategory::Casualties: return "Casualties";
        case CvnCategory::DisplacementAndRefugees: return "Displacement and Refugees";
        case CvnCategory::ImprisonmentAndDetention: return "Imprisonment and Detention";
        case CvnCategory::MissingAndNonCasualtyVictims:
            return "Missing and Non-Casualty Victims";
        case CvnCategory::VulnerableAndAffectedGroups:
            return "Vulnerable and Affected Groups";
        case CvnCategory::DeprivationMalnutritionAndHunger:
            return "Deprivation Malnutrition and Hunger";
        case CvnCategory::HealthAndMedicalConditions: return "Health and Medical Conditions";
        case CvnCategory::HumanitarianAidAndDependence:
            return "Humanitarian Aid and Dependence";
        case CvnCategory::Other: return "Other";
    }
    return "Other";
}

std::optional<GroupSize> parse_group_size(std::string_view s) {
    if (s == "Singular") return GroupSize::Singular;
    if (s == "Double") return GroupSize::Double;
    if (s == "Many") return GroupSize::Many;
    if (s == "Not_Applicable" || s == "Not Applicable") return GroupSize::NotApplicable;
    return std::nullopt;
}

std::optional<CvnCategory> parse_category(std::string_view s) {
    if (s == "Casualties") return CvnCategory::Casualties;
    if (s == "Displacement and Refugees" || s == "Displaced and Refugees")
        return CvnCategory::DisplacementAndRefugees;
    if (s == "Imprisonment and Detention") return CvnCategory::ImprisonmentAndDetention;
    if (s == "Missing and Non-Casualty Victims")
        return CvnCategory::MissingAndNonCasualtyVictims;
    if (s == "Vulnerable and Affected Groups") return CvnCategory::VulnerableAndAffectedGroups;
    if (s == "Deprivation Malnutrition and Hunger" ||
        s == "Deprivation, Malnutrition and Hunger")
        return CvnCategory::DeprivationMalnutritionAndHunger;
    if (s == "Health and Medical Conditions") return CvnCategory::HealthAndMedicalConditions;
    if (s == "Humanitarian Aid and Dependence") return CvnCategory::HumanitarianAidAndDependence;
    if (s == "Other") return CvnCategory::Other;
    return std::nullopt;
}

namespace {

std::optional<std::string> record_from_json(const json& j, CvnRecord& r) {
    for (const char* f : {"article_id", "outlet", "published_at", "Keyword", "Statistics",
                          "Statistics Type", "Association", "Is Child", "Is Human",
                          "Group Size", "Nationality", "Side", "Sentence"})
        if (!j.contains(f) || !j[f].is_string()) return std::string("missing field: ") + f;
    r.article_id = j["article_id"].get<std::string>();
    r.outlet = j["outlet"].get<std::string>();
    auto d = Date::parse(j["published_at"].get<std::string>());
    if (!d) return "bad published_at";
    r.published_at = *d;
    r.keyword = j["Keyword"].get<std::string>();
    r.statistics = j["Statistics"].get<std::string>();
    r.statistics_type = j["Statistics Type"].get<std::string>();
    r.association = j["Association"].get<std::string>();
    std::string child = j["Is Child"].get<std::string>();
    if (child != "Yes" && child != "No") return "unknown enum value: Is Child";
    r.is_child = child == "Yes";
    std::string human = j["Is Human"].get<std::string>();
    if (human != "Yes" && human != "No") return "unknown enum value: Is Human";
    r.is_human = human == "Yes";
    auto gs = parse_group_size(j["Group Size"].get<std::string>());
    if (!gs) return "unknown enum value: Group Size";
    r.group_size = *gs;
    if (!r.is_human && r.group_size != GroupSize::NotApplicable)
        return "non-human statistic must have Group Size == Not_Applicable";
    r.nationality = j["Nationality"].get<std::string>();
    auto side = parse_side(j["Side"].get<std::string>());
    if (!side) return "unknown enum value: Side";
    r.side = *side;
    r.sentence = j["Sentence"].get<std::string>();
    if (j.contains("Cited")) {
        std::string v = j["Cited"].get<std::string>();
        if (v == "Yes")
            r.cited = true;
        else if (v == "No")
            r.cited = false;
        else
            return "unknown enum value: Cited";
        if (*r.cited) {
            if (j.contains("Citing_Source"))
                r.citing_source = j["Citing_Source"].get<std::string>();
            if (j.contains("Citing_Phrase"))
                r.citing_phrase = j["Citing_Phrase"].get<std::string>();
        }
    }
    if (j.contains("Category")) {
        auto c = parse_category(j["Category"].get<std::string>());
        if (!c) return "unknown enum value: Category";
        r.category = *c;
    }
    return std::nullopt;
}

}  // namespace

StoreLoadResult load_cvn_store(const std::filesystem::path& path) {
    std::string text = io::read_file(path);
    StoreLoadResult out;
    size_t line_no = 0, start = 0;
    while (start < text.size()) {
        size_t nl = text.find('\n', start);
        std::string line =
            text.substr(start, (nl == std::string::npos ? text.size() : nl) - start);
        start = (nl == std::string::npos) ? text.size() : nl + 1;
        ++line_no;
        if (str::trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            out.rejections.push_back({line_no, "not a JSON object"});
            continue;
        }
        CvnRecord r;
        if (auto err = record_from_json(j, r)) {
            out.rejections.push_back({line_no, *err});
            continue;
        }
        out.records.push_back(std::move(r));
    }
    return out;
}

std::string serialize_cvn(const CvnRecord& r) {
    json j;
    j["article_id"] = r.article_id;
    j["outlet"] = r.outlet;
    j["published_at"] = r.published_at.to_string();
    j["Keyword"] = r.keyword;
    j["Statistics"] = r.statistics;
    j["Statistics Type"] = r.statistics_type;
    j["Association"] = r.association;
    j["Is Child"] = r.is_child ? "Yes" : "No";
    j["Is Human"] = r.is_human ? "Yes" : "No";
    j["Group Size"] = group_size_name(r.group_size);
    j["Nationality"] = r.nationality;
    j["Side"] = side_name(r.side);
    j["Sentence"] = r.sentence;
    if (r.cited) {
        j["Cited"] = *r.cited ? "Yes" : "No";
        if (r.citing_source) j["Citing_Source"] = *r.citing_source;
        if (r.citing_phrase) j["Citing_Phrase"] = *r.citing_phrase;
    }
    if (r.category) j["Category"] = category_name(*r.category);
    return j.dump();
}

void write_cvn_store(const std::filesystem::path& path, const std::vector<CvnRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        out += serialize_cvn(r);
        out.push_back('\n');
    }
    io::write_file_atomic(path, out);
}

std::vector<CvnRecord> filter_cvns(const std::vector<CvnRecord>& records) {
    std::vector<CvnRecord> out;
    for (const auto& r : records) {
        if (!r.is_human) continue;
        if (r.group_size != GroupSize::Many) continue;
        if (r.side != Side::Palestine && r.side != Side::Israel) continue;
        out.push_back(r);
    }
    return out;
}

CategoryRules CategoryRules::load(const std::filesystem::path& path) {
    auto rows = io::read_tsv(path);
    CategoryRules out;
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != 2)
            throw InputError("category rules row " + std::to_string(i + 1) +
                             ": expected 2 columns");
        auto cat = parse_category(str::trim(row[1]));
        if (!cat) throw InputError("category rules: unknown category " + row[1]);
        std::string key = str::lower(str::trim(row[0]));
        if (key.empty()) throw InputError("category rules: empty keyword");
        out.rules.emplace_back(key, *cat);
    }
    if (out.rules.empty()) throw InputError("category rules file is empty");
    return out;
}

CategoryRules CategoryRules::defaults() {
    CategoryRules out;
    auto add = [&](const char* k, CvnCategory c) { out.rules.emplace_back(k, c); };
    add("death", CvnCategory::Casualties);
    add("dead", CvnCategory::Casualties);
    add("killed", CvnCategory::Casualties);
    add("casualt", CvnCategory::Casualties);
    add("fatalit", CvnCategory::Casualties);
    add("injur", CvnCategory::Casualties);
    add("wound", CvnCategory::Casualties);
    add("displac", CvnCategory::DisplacementAndRefugees);
    add("refugee", CvnCategory::DisplacementAndRefugees);
    add("evacuat", CvnCategory::DisplacementAndRefugees);
    add("detain", CvnCategory::ImprisonmentAndDetention);
    add("detention", CvnCategory::ImprisonmentAndDetention);
    add("prison", CvnCategory::ImprisonmentAndDetention);
    add("hostage", CvnCategory::ImprisonmentAndDetention);
    add("captiv", CvnCategory::ImprisonmentAndDetention);
    add("arrest", CvnCategory::ImprisonmentAndDetention);
    add("abduct", CvnCategory::ImprisonmentAndDetention);
    add("kidnap", CvnCategory::ImprisonmentAndDetention);
    add("missing", CvnCategory::MissingAndNonCasualtyVictims);
    add("unaccounted", CvnCategory::MissingAndNonCasualtyVictims);
    add("starv", CvnCategory::DeprivationMalnutritionAndHunger);
    add("hunger", CvnCategory::DeprivationMalnutritionAndHunger);
    add("malnutrition", CvnCategory::DeprivationMalnutritionAndHunger);
    add("famine", CvnCategory::DeprivationMalnutritionAndHunger);
    add("deprivation", CvnCategory::DeprivationMalnutritionAndHunger);
    add("humanitarian", CvnCategory::HumanitarianAidAndDependence);
    add("aid depend", CvnCategory::HumanitarianAidAndDependence);
    add("health", CvnCategory::HealthAndMedicalConditions);
    add("medical", CvnCategory::HealthAndMedicalConditions);
    add("disease", CvnCategory::HealthAndMedicalConditions);
    add("patient", CvnCategory::HealthAndMedicalConditions);
    add("sick", CvnCategory::HealthAndMedicalConditions);
    add("vulnerab", CvnCategory::VulnerableAndAffectedGroups);
    add("affected", CvnCategory::VulnerableAndAffectedGroups);
    add("orphan", CvnCategory::VulnerableAndAffectedGroups);
    add("trapped", CvnCategory::VulnerableAndAffectedGroups);
    return out;
}

CvnCategory map_category(const std::string& statistics_type, const CategoryRules& rules) {
    std::string hay = str::lower(statistics_type);
    for (const auto& [key, cat] : rules.rules)
        if (hay.find(key) != std::string::npos) return cat;
    return CvnCategory::Other;
}

std::optional<double> CitationStats::ratio(const std::string& outlet) const {
    auto p = cells.find({outlet, Side::Palestine});
    auto i = cells.find({outlet, Side::Israel});
    if (p == cells.end() || i == cells.end()) return std::nullopt;
    auto pp = p->second.percent(), pi = i->second.percent();
    if (!pp || !pi || *pi == 0.0) return std::nullopt;
    return *pp / *pi;
}

CitationStats citation_stats(const std::vector<CvnRecord>& records) {
    CitationStats out;
    for (const auto& r : records) {
        if (!r.cited) continue;
        if (r.side != Side::Palestine && r.side != Side::Israel) continue;
        auto& cell = out.cells[{r.outlet, r.side}];
        cell.total += 1;
        if (*r.cited) cell.cited_count += 1;
    }
    return out;
}

const char* doubt_category_name(DoubtCategory c) {
    return c == DoubtCategory::SourceDoubting ? "Source Doubting" : "Uncertainty in Numbers";
}

DoubtLexicon DoubtLexicon::load(const std::filesystem::path& path) {
    auto rows = io::read_tsv(path);
    DoubtLexicon lex;
    std::set<std::string> seen;
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != 2)
            throw InputError("doubt lexicon row " + std::to_string(i + 1) +
                             ": expected 2 columns");
        std::string phrase = str::trim(row[0]);
        std::string cat = str::trim(row[1]);
        if (phrase.empty()) throw InputError("doubt lexicon: empty phrase");
        if (!seen.insert(str::lower(phrase)).second)
            throw InputError("doubt lexicon: duplicate phrase " + phrase);
        DoubtCategory category;
        if (cat == "Source Doubting")
            category = DoubtCategory::SourceDoubting;
        else if (cat == "Uncertainty in Numbers")
            category = DoubtCategory::UncertaintyInNumbers;
        else
            throw InputError("doubt lexicon: unknown category " + cat);
        lex.entries.push_back({phrase, category});
    }
    return lex;
}

namespace {

inline unsigned char fold(unsigned char c) {
    return static_cast<unsigned char>(std::tolower(c));
}

inline bool is_word_char(unsigned char c) { return std::isalnum(c) != 0; }

}  // namespace

DoubtMatcher::DoubtMatcher(const DoubtLexicon& lexicon) : lexicon_(lexicon) {
    nodes_.emplace_back();  // root
    for (size_t e = 0; e < lexicon_.entries.size(); ++e) {
        int cur = 0;
        for (unsigned char raw : lexicon_.entries[e].phrase) {
            unsigned char c = fold(raw);
            auto it = nodes_[cur].next.find(c);
            if (it == nodes_[cur].next.end()) {
                nodes_[cur].next[c] = static_cast<int>(nodes_.size());
                cur = static_cast<int>(nodes_.size());
                nodes_.emplace_back();
            } else {
                cur = it->second;
            }
        }
        nodes_[cur].outputs.push_back(e);
    }
    // breadth-first failure links
    std::deque<int> queue;
    for (auto& [c, child] : nodes_[0].next) {
        nodes_[child].fail = 0;
        queue.push_back(child);
    }
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (auto& [c, v] : nodes_[u].next) {
            int f = nodes_[u].fail;
            while (f != 0 && !nodes_[f].next.count(c)) f = nodes_[f].fail;
            auto it = nodes_[f].next.find(c);
            nodes_[v].fail = (it != nodes_[f].next.end() && it->second != v) ? it->second : 0;
            for (size_t out : nodes_[nodes_[v].fail].outputs) nodes_[v].outputs.push_back(out);
            queue.push_back(v);
        }
    }
}

std::vector<DoubtMatch> DoubtMatcher::match(std::string_view sentence) const {
    // collect all word-bounded candidates, then resolve overlaps
    std::vector<DoubtMatch> candidates;
    int state = 0;
    for (size_t i = 0; i < sentence.size(); ++i) {
        unsigned char c = fold(static_cast<unsigned char>(sentence[i]));
        while (state != 0 && !nodes_[state].next.count(c)) state = nodes_[state].fail;
        auto it = nodes_[state].next.find(c);
        state = (it != nodes_[state].next.end()) ? it->second : 0;
        for (size_t e : nodes_[state].outputs) {
            size_t len = lexicon_.entries[e].phrase.size();
            size_t begin = i + 1 - len;
            bool left_ok = begin == 0 ||
                           !is_word_char(static_cast<unsigned char>(sentence[begin - 1]));
            bool right_ok = i + 1 == sentence.size() ||
                            !is_word_char(static_cast<unsigned char>(sentence[i + 1]));
            if (left_ok && right_ok) candidates.push_back({begin, i + 1, e});
        }
    }
    // longest phrase wins, then leftmost; every character used at most once
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const DoubtMatch& a, const DoubtMatch& b) {
                         size_t la = a.end - a.begin, lb = b.end - b.begin;
                         if (la != lb) return la > lb;
                         return a.begin < b.begin;
                     });
    std::vector<DoubtMatch> accepted;
    for (const auto& cand : candidates) {
        bool overlaps = false;
        for (const auto& acc : accepted) {
            if (cand.begin < acc.end && acc.begin < cand.end) {
                overlaps = true;
                break;
            }
        }
        if (!overlaps) accepted.push_back(cand);
    }
    std::sort(accepted.begin(), accepted.end(),
              [](const DoubtMatch& a, const DoubtMatch& b) { return a.begin < b.begin; });
    return accepted;
}

std::vector<DoubtMatch> match_doubt_phrases(std::string_view sentence,
                                            const DoubtLexicon& lexicon) {
    return DoubtMatcher(lexicon).match(sentence);
}

DoubtTally doubt_tally(const std::vector<CvnRecord>& records, const DoubtLexicon& lexicon) {
    DoubtMatcher matcher(lexicon);
    DoubtTally tally;
    for (const auto& r : records) {
        if (r.side != Side::Palestine && r.side != Side::Israel) continue;
        auto& per = tally.outlets[r.outlet];
        // make sure every lexicon phrase has a row, even at zero
        if (per.by_phrase.empty())
            for (const auto& e : lexicon.entries) per.by_phrase[e.phrase];
        int side_idx = (r.side == Side::Palestine) ? 0 : 1;
        for (const auto& m : matcher.match(r.sentence)) {
            const auto& entry = matcher.entry(m.entry_index);
            int cat_idx = (entry.category == DoubtCategory::SourceDoubting) ? 0 : 1;
            per.total += 1;
            per.by_side[side_idx] += 1;
            per.by_category_side[cat_idx][side_idx] += 1;
            auto& row = per.by_phrase[entry.phrase];
            row.total += 1;
            (side_idx == 0 ? row.palestine : row.israel) += 1;
        }
    }
    return tally;
}

}  // namespace newslens::cvn
