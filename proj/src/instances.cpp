#include "newslens/instances.hpp"

#include <set>

#include <nlohmann/json.hpp>

#include "newslens/io.hpp"
#include "newslens/stats.hpp"

using json = nlohmann::json;

namespace newslens::instances {

const char* instance_type_name(InstanceType t) {
    return t == InstanceType::Individualized ? "Individualized" : "Grouped";
}

const char* civilian_status_name(CivilianStatus s) {
    switch (s) {
        case CivilianStatus::Military: return "Military";
        case CivilianStatus::Government: return "Government";
        case CivilianStatus::Civilian: return "Civilian";
    }
    return "Civilian";
}

const char* location_name(Location l) {
    switch (l) {
        case Location::Israel: return "Israel";
        case Location::Gaza: return "Gaza";
        case Location::WestBank: return "West Bank";
        case Location::Other: return "Other";
    }
    return "Other";
}

const char* yes_no_na_name(YesNoNA v) {
    switch (v) {
        case YesNoNA::Yes: return "Yes";
        case YesNoNA::No: return "No";
        case YesNoNA::NA: return "N_A";
    }
    return "N_A";
}

const char* hardship_name(Hardship h) {
    switch (h) {
        case Hardship::Casualties: return "Casualties";
        case Hardship::DisplacementAndRefugees: return "Displacement and Refugees";
        case Hardship::ImprisonmentAndDetention: return "Imprisonment and Detention";
        case Hardship::HealthAndMedicalConditions: return "Health and Medical Conditions";
        case Hardship::DeprivationMalnutritionAndHunger:
            return "Deprivation Malnutrition and Hunger";
        case Hardship::HumanitarianAidAndDependence: return "Humanitarian Aid and Dependence";
        case Hardship::Missing: return "Missing";
        case Hardship::VulnerableAndAffectedGroups: return "Vulnerable and Affected Groups";
        case Hardship::OtherHardship: return "Other Hardship";
        case Hardship::InflictedUponOthers: return "Inflicted upon others";
    }
    return "Other Hardship";
}

std::optional<InstanceType> parse_instance_type(std::string_view s) {
    if (s == "Individualized") return InstanceType::Individualized;
    if (s == "Grouped") return InstanceType::Grouped;
    return std::nullopt;
}

std::optional<CivilianStatus> parse_civilian_status(std::string_view s) {
    if (s == "Military") return CivilianStatus::Military;
    if (s == "Government") return CivilianStatus::Government;
    if (s == "Civilian") return CivilianStatus::Civilian;
    return std::nullopt;
}

std::optional<Location> parse_location(std::string_view s) {
    if (s == "Israel") return Location::Israel;
    if (s == "Gaza") return Location::Gaza;
    if (s == "West Bank") return Location::WestBank;
    if (s == "Other") return Location::Other;
    return std::nullopt;
}

std::optional<YesNoNA> parse_yes_no_na(std::string_view s) {
    if (s == "Yes") return YesNoNA::Yes;
    if (s == "No") return YesNoNA::No;
    if (s == "N_A") return YesNoNA::NA;
    return std::nullopt;
}

std::optional<Hardship> parse_hardship(std::string_view s) {
    if (s == "Casualties") return Hardship::Casualties;
    if (s == "Displacement and Refugees") return Hardship::DisplacementAndRefugees;
    if (s == "Imprisonment and Detention") return Hardship::ImprisonmentAndDetention;
    if (s == "Health and Medical Conditions") return Hardship::HealthAndMedicalConditions;
    if (s == "Deprivation Malnutrition and Hunger" ||
        s == "Deprivation, Malnutrition and Hunger")
        return Hardship::DeprivationMalnutritionAndHunger;
    if (s == "Humanitarian Aid and Dependence") return Hardship::HumanitarianAidAndDependence;
    if (s == "Missing") return Hardship::Missing;
    if (s == "Vulnerable and Affected Groups") return Hardship::VulnerableAndAffectedGroups;
    if (s == "Other Hardship") return Hardship::OtherHardship;
    if (s == "Inflicted upon others") return Hardship::InflictedUponOthers;
    return std::nullopt;
}

namespace {

std::optional<std::string> record_from_json(const json& j, InstanceRecord& r) {
    for (const char* f : {"article_id", "outlet", "published_at", "Type", "Entity", "Side",
                          "Civilian_Status", "Location", "Primary", "Quoted", "Phrases"})
        if (!j.contains(f) || !j[f].is_string()) return std::string("missing field: ") + f;
    r.article_id = j["article_id"].get<std::string>();
    r.outlet = j["outlet"].get<std::string>();
    auto d = Date::parse(j["published_at"].get<std::string>());
    if (!d) return "bad published_at";
    r.published_at = *d;
    auto type = parse_instance_type(j["Type"].get<std::string>());
    if (!type) return "unknown enum value: Type";
    r.type = *type;
    r.entity = j["Entity"].get<std::string>();
    auto side = parse_side(j["Side"].get<std::string>());
    if (!side) return "unknown enum value: Side";
    r.side = *side;
    auto cs = parse_civilian_status(j["Civilian_Status"].get<std::string>());
    if (!cs) return "unknown enum value: Civilian_Status";
    r.civilian_status = *cs;
    auto loc = parse_location(j["Location"].get<std::string>());
    if (!loc) return "unknown enum value: Location";
    r.location = *loc;
    auto primary = parse_yes_no_na(j["Primary"].get<std::string>());
    if (!primary) return "unknown enum value: Primary";
    r.primary = *primary;
    auto quoted = parse_yes_no_na(j["Quoted"].get<std::string>());
    if (!quoted) return "unknown enum value: Quoted";
    r.quoted = *quoted;
    r.phrases = j["Phrases"].get<std::string>();
    if (r.type == InstanceType::Grouped && r.primary != YesNoNA::NA)
        return "grouped instance must have Primary == N_A";
    if (r.type == InstanceType::Individualized && r.quoted != YesNoNA::NA)
        return "individualized instance must have Quoted == N_A";
    if (j.contains("Hardship")) {
        auto h = parse_hardship(j["Hardship"].get<std::string>());
        if (!h) return "unknown enum value: Hardship";
        r.hardship = *h;
    }
    if (j.contains("Oct_7_Attack")) {
        std::string v = j["Oct_7_Attack"].get<std::string>();
        if (v == "Yes")
            r.oct7_related = true;
        else if (v == "No")
            r.oct7_related = false;
        else
            return "unknown enum value: Oct_7_Attack";
    }
    if (j.contains("Is_Child")) {
        std::string v = j["Is_Child"].get<std::string>();
        if (v != "N_A" && !v.empty()) r.child_term = v;
    }
    return std::nullopt;
}

}  // namespace

StoreLoadResult load_instance_store(const std::filesystem::path& path) {
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
        InstanceRecord r;
        if (auto err = record_from_json(j, r)) {
            out.rejections.push_back({line_no, *err});
            continue;
        }
        out.records.push_back(std::move(r));
    }
    return out;
}

std::string serialize_instance(const InstanceRecord& r) {
    json j;
    j["article_id"] = r.article_id;
    j["outlet"] = r.outlet;
    j["published_at"] = r.published_at.to_string();
    j["Type"] = instance_type_name(r.type);
    j["Entity"] = r.entity;
    j["Side"] = side_name(r.side);
    j["Civilian_Status"] = civilian_status_name(r.civilian_status);
    j["Location"] = location_name(r.location);
    j["Primary"] = yes_no_na_name(r.primary);
    j["Quoted"] = yes_no_na_name(r.quoted);
    j["Phrases"] = r.phrases;
    if (r.hardship) j["Hardship"] = hardship_name(*r.hardship);
    if (r.oct7_related) j["Oct_7_Attack"] = *r.oct7_related ? "Yes" : "No";
    if (r.child_term) j["Is_Child"] = *r.child_term;
    return j.dump();
}

void write_instance_store(const std::filesystem::path& path,
                          const std::vector<InstanceRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        out += serialize_instance(r);
        out.push_back('\n');
    }
    io::write_file_atomic(path, out);
}

std::vector<InstanceRecord> filter_individualized_stories(
    const std::vector<InstanceRecord>& records) {
    std::vector<InstanceRecord> out;
    std::set<std::pair<std::string, std::string>> seen;  // (article_id, normalized entity)
    for (const auto& r : records) {
        if (r.type != InstanceType::Individualized) continue;
        if (r.side != Side::Palestine && r.side != Side::Israel) continue;
        if (r.location != Location::Gaza && r.location != Location::Israel) continue;
        if (r.civilian_status != CivilianStatus::Civilian) continue;
        if (r.primary != YesNoNA::Yes) continue;
        if (!seen.insert({r.article_id, str::normalize_key(r.entity)}).second) continue;
        out.push_back(r);
    }
    return out;
}

IgSummary ig_ratio_table(const std::vector<InstanceRecord>& records) {
    IgSummary out;
    for (const auto& r : records) {
        if (r.side != Side::Palestine && r.side != Side::Israel) {
            out.dropped[r.outlet] += 1;
            continue;
        }
        auto& cell = out.cells[{r.outlet, r.side}];
        if (r.type == InstanceType::Individualized)
            cell.individual_count += 1;
        else
            cell.group_count += 1;
    }
    return out;
}

SecondaryPrimaryRatios secondary_primary_ratio(const PrimacyCounts& counts) {
    SecondaryPrimaryRatios out;
    if (counts.primary_israel > 0)
        out.ratio_israel = static_cast<double>(counts.secondary_israel) /
                           static_cast<double>(counts.primary_israel);
    if (counts.primary_palestine > 0)
        out.ratio_palestine = static_cast<double>(counts.secondary_palestine) /
                              static_cast<double>(counts.primary_palestine);
    if (out.ratio_israel && out.ratio_palestine)
        out.cohens_h = stats::cohens_h(*out.ratio_israel, *out.ratio_palestine);
    return out;
}

std::optional<double> oct7_share(const std::vector<InstanceRecord>& stories) {
    if (stories.empty()) return std::nullopt;
    long long yes = 0;
    for (const auto& s : stories)
        if (s.oct7_related && *s.oct7_related) ++yes;
    return static_cast<double>(yes) / static_cast<double>(stories.size());
}

ChildShares child_shares(const std::vector<InstanceRecord>& stories,
                         const ChildDeathCounts& deaths) {
    ChildShares out;
    out.deaths = deaths;
    for (const auto& s : stories) {
        if (s.side != Side::Palestine && s.side != Side::Israel) continue;
        auto& cell = out.by_outlet_side[{s.outlet, s.side}];
        cell.total_stories += 1;
        if (s.child_term) cell.child_stories += 1;
    }
    return out;
}

std::map<std::string, std::map<Date, std::map<Side, long long>>> story_events_on_dates(
    const std::vector<InstanceRecord>& stories, const std::vector<Date>& dates, int lag_days) {
    std::map<std::string, std::map<Date, std::map<Side, long long>>> out;
    for (const auto& s : stories) {
        for (const auto& d : dates) {
            long long offset = s.published_at - d;
            if (offset < 0 || offset > lag_days) continue;
            out[s.outlet][d][s.side] += 1;
        }
    }
    return out;
}

}  // namespace newslens::instances
