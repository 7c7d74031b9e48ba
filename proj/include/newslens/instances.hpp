#ifndef NEWSLENS_INSTANCES_HPP
#define NEWSLENS_INSTANCES_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "newslens/core.hpp"

namespace newslens::instances {

enum class InstanceType { Individualized, Grouped };
enum class CivilianStatus { Military, Government, Civilian };
enum class Location { Israel, Gaza, WestBank, Other };
enum class YesNoNA { Yes, No, NA };

enum class Hardship {
    Casualties,
    DisplacementAndRefugees,
    ImprisonmentAndDetention,
    HealthAndMedicalConditions,
    DeprivationMalnutritionAndHunger,
    HumanitarianAidAndDependence,
    Missing,
    VulnerableAndAffectedGroups,
    OtherHardship,
    InflictedUponOthers,  // hardship caused by the story's own subject
};

const char* instance_type_name(InstanceType t);
const char* civilian_status_name(CivilianStatus s);
const char* location_name(Location l);
const char* yes_no_na_name(YesNoNA v);
const char* hardship_name(Hardship h);
std::optional<InstanceType> parse_instance_type(std::string_view s);
std::optional<CivilianStatus> parse_civilian_status(std::string_view s);
std::optional<Location> parse_location(std::string_view s);
std::optional<YesNoNA> parse_yes_no_na(std::string_view s);
// Accepts the label with or without the comma after "Deprivation".
std::optional<Hardship> parse_hardship(std::string_view s);

// One individualized/grouped hardship mention, carrying the merged
// prompt-1/2/3 fields plus article metadata.
struct InstanceRecord {
    std::string article_id;
    std::string outlet;
    Date published_at;
    InstanceType type = InstanceType::Grouped;
    std::string entity;
    Side side = Side::Other;
    CivilianStatus civilian_status = CivilianStatus::Civilian;
    Location location = Location::Other;
    YesNoNA primary = YesNoNA::NA;  // N_A for grouped instances
    YesNoNA quoted = YesNoNA::NA;   // N_A for individualized instances
    std::string phrases;
    std::optional<Hardship> hardship;
    std::optional<bool> oct7_related;
    std::optional<std::string> child_term;
};

struct StoreRejection {
    size_t line_number = 0;
    std::string reason;
};

struct StoreLoadResult {
    std::vector<InstanceRecord> records;
    std::vector<StoreRejection> rejections;
};

// Line-delimited JSON store using the prompt schema's verbatim field names
// (Type, Entity, Side, Civilian_Status, Location, Primary, Quoted, Phrases,
// Hardship, Oct_7_Attack, Is_Child) plus article metadata.
StoreLoadResult load_instance_store(const std::filesystem::path& path);
void write_instance_store(const std::filesystem::path& path,
                          const std::vector<InstanceRecord>& records);
std::string serialize_instance(const InstanceRecord& r);

// Individualized stories: type Individualized, side Palestine/Israel,
// location Gaza/Israel, civilian, primary figure; deduplicated per article by
// normalized entity (first occurrence wins).
std::vector<InstanceRecord> filter_individualized_stories(
    const std::vector<InstanceRecord>& records);

struct IgCell {
    long long individual_count = 0;
    long long group_count = 0;
    std::optional<double> ratio() const {
        if (group_count == 0) return std::nullopt;
        return static_cast<double>(individual_count) / static_cast<double>(group_count);
    }
};

struct IgSummary {
    // keyed (outlet, side), sides restricted to Palestine/Israel
    std::map<std::pair<std::string, Side>, IgCell> cells;
    // records whose side was Both/Other, per outlet (partition check)
    std::map<std::string, long long> dropped;
};

IgSummary ig_ratio_table(const std::vector<InstanceRecord>& records);

struct PrimacyCounts {
    long long primary_israel = 0;
    long long secondary_israel = 0;
    long long primary_palestine = 0;
    long long secondary_palestine = 0;
};

struct SecondaryPrimaryRatios {
    std::optional<double> ratio_israel;     // secondary / primary
    std::optional<double> ratio_palestine;  // secondary / primary
    std::optional<double> cohens_h;         // of the two ratios, when both defined
};

SecondaryPrimaryRatios secondary_primary_ratio(const PrimacyCounts& counts);

// Share of stories flagged as related to Oct 7; absent on empty input.
std::optional<double> oct7_share(const std::vector<InstanceRecord>& stories);

struct ChildDeathCounts {
    long long children_palestine = 14000;
    long long total_palestine = 42000;
    long long children_israel = 38;
    long long total_israel = 1400;
};

struct ChildShareCell {
    long long child_stories = 0;
    long long total_stories = 0;
};

struct ChildShares {
    std::map<std::pair<std::string, Side>, ChildShareCell> by_outlet_side;
    ChildDeathCounts deaths;
};

// Counts stories with an explicit child term per (outlet, side); the deaths
// baseline rides along for the report emitters.
ChildShares child_shares(const std::vector<InstanceRecord>& stories,
                         const ChildDeathCounts& deaths);

// Story counts per (outlet, side, date) over [date, date + lag_days].
// Callers pre-filter `stories` to the qualifying set.
std::map<std::string, std::map<Date, std::map<Side, long long>>> story_events_on_dates(
    const std::vector<InstanceRecord>& stories, const std::vector<Date>& dates, int lag_days);

}  // namespace newslens::instances

#endif  // NEWSLENS_INSTANCES_HPP
