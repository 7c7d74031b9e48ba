#ifndef NEWSLENS_CVN_HPP
#define NEWSLENS_CVN_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "newslens/core.hpp"

namespace newslens::cvn {

enum class GroupSize { Singular, Double, Many, NotApplicable };

enum class CvnCategory {
    Casualties,
    DisplacementAndRefugees,
    ImprisonmentAndDetention,
    MissingAndNonCasualtyVictims,
    VulnerableAndAffectedGroups,
    DeprivationMalnutritionAndHunger,
    HealthAndMedicalConditions,
    HumanitarianAidAndDependence,
    Other,
};

const char* group_size_name(GroupSize g);
const char* category_name(CvnCategory c);
std::optional<GroupSize> parse_group_size(std::string_view s);
std::optional<CvnCategory> parse_category(std::string_view s);

// One civilian-victim-number mention plus citation and category annotations.
struct CvnRecord {
    std::string article_id;
    std::string outlet;
    Date published_at;
    std::string keyword;
    std::string statistics;       // verbatim number expression
    std::string statistics_type;  // free text ("Statistics About Deaths", ...)
    std::string association;
    bool is_child = false;
    bool is_human = false;
    GroupSize group_size = GroupSize::NotApplicable;
    std::string nationality;
    Side side = Side::Other;
    std::string sentence;
    std::optional<bool> cited;
    std::optional<std::string> citing_source;
    std::optional<std::string> citing_phrase;
    std::optional<CvnCategory> category;
};

struct StoreRejection {
    size_t line_number = 0;
    std::string reason;
};

struct StoreLoadResult {
    std::vector<CvnRecord> records;
    std::vector<StoreRejection> rejections;
};

// Line-delimited JSON store with the prompt's verbatim field names
// ("Keyword", "Statistics", "Statistics Type", "Association", "Is Child",
// "Is Human", "Group Size", "Nationality", "Side", "Sentence", plus optional
// "Cited"/"Citing_Source"/"Citing_Phrase"/"Category") and article metadata.
StoreLoadResult load_cvn_store(const std::filesystem::path& path);
void write_cvn_store(const std::filesystem::path& path, const std::vector<CvnRecord>& records);
std::string serialize_cvn(const CvnRecord& r);

// Keeps records with Is Human == Yes, Group Size == Many, side P/I.
std::vector<CvnRecord> filter_cvns(const std::vector<CvnRecord>& records);

// Ordered keyword rules mapping a Statistics Type string to a category;
// the first rule whose keyword occurs (case-insensitive substring) wins,
// unmatched falls through to Other.
struct CategoryRules {
    std::vector<std::pair<std::string, CvnCategory>> rules;

    // Two-column TSV (keyword, category), '#' comments.
    static CategoryRules load(const std::filesystem::path& path);
    static CategoryRules defaults();
};

CvnCategory map_category(const std::string& statistics_type, const CategoryRules& rules);

struct CitationCell {
    long long cited_count = 0;
    long long total = 0;
    std::optional<double> percent() const {
        if (total == 0) return std::nullopt;
        return 100.0 * static_cast<double>(cited_count) / static_cast<double>(total);
    }
};

struct CitationStats {
    std::map<std::pair<std::string, Side>, CitationCell> cells;

    // percent_Palestine / percent_Israel for one outlet.
    std::optional<double> ratio(const std::string& outlet) const;
};

// Counts records with cited == Yes over records whose cited field is
// populated, per (outlet, side in {P, I}).
CitationStats citation_stats(const std::vector<CvnRecord>& records);

enum class DoubtCategory { SourceDoubting, UncertaintyInNumbers };

const char* doubt_category_name(DoubtCategory c);

struct DoubtLexicon {
    struct Entry {
        std::string phrase;
        DoubtCategory category;
    };
    std::vector<Entry> entries;

    // Two-column TSV (phrase, category), '#' comments; phrases must be unique
    // after case folding.
    static DoubtLexicon load(const std::filesystem::path& path);
};

struct DoubtMatch {
    size_t begin = 0;  // character offsets into the sentence
    size_t end = 0;    // one past the last matched character
    size_t entry_index = 0;
};

// Multi-pattern matcher over case-folded text (Aho-Corasick); immutable and
// shareable once built. Matching is case-insensitive, requires non-alphanumeric
// characters (or the text edge) on both sides of a hit, and resolves
// overlapping candidates longest-phrase-first, then leftmost, so each
// character belongs to at most one match.
class DoubtMatcher {
  public:
    explicit DoubtMatcher(const DoubtLexicon& lexicon);

    std::vector<DoubtMatch> match(std::string_view sentence) const;
    const DoubtLexicon::Entry& entry(size_t index) const { return lexicon_.entries[index]; }

  private:
    struct Node {
        std::map<unsigned char, int> next;
        int fail = 0;
        std::vector<size_t> outputs;  // entry indices ending here
    };
    DoubtLexicon lexicon_;
    std::vector<Node> nodes_;
};

std::vector<DoubtMatch> match_doubt_phrases(std::string_view sentence,
                                            const DoubtLexicon& lexicon);

struct DoubtTally {
    struct PhraseRow {
        long long total = 0;
        long long palestine = 0;
        long long israel = 0;
    };
    struct PerOutlet {
        long long total = 0;
        long long by_side[2] = {0, 0};              // [P, I]
        long long by_category_side[2][2] = {{0, 0}, {0, 0}};  // [cat][side]
        std::map<std::string, PhraseRow> by_phrase;
    };
    std::map<std::string, PerOutlet> outlets;
};

// One tallied mention per (record, match); side attribution follows the CVN
// record's side. Callers restrict `records` to casualty-category sentences.
DoubtTally doubt_tally(const std::vector<CvnRecord>& records, const DoubtLexicon& lexicon);

}  // namespace newslens::cvn

#endif  // NEWSLENS_CVN_HPP
