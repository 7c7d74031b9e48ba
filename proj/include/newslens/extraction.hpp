#ifndef NEWSLENS_EXTRACTION_HPP
#define NEWSLENS_EXTRACTION_HPP

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "newslens/core.hpp"
#include "newslens/corpus.hpp"

namespace newslens::extraction {

enum class PromptId {
    P1Instances,
    P2Hardship,
    P3Child,
    CvnExtract,
    CvnCitation,
    CvnDoubt,
    HeartVividness,
    HeartPlotVolume,
};

const char* prompt_id_name(PromptId id);
std::optional<PromptId> parse_prompt_id(std::string_view s);

struct FieldSchema {
    std::string name;
    std::vector<std::string> allowed;  // empty = free text
};

struct PromptTemplate {
    PromptId id = PromptId::P1Instances;
    std::string template_text;  // named {placeholders}; "{{"/"}}" escape braces
    std::string root_field;     // array field holding the records ("instances")
    std::vector<FieldSchema> response_schema;

    std::vector<std::string> placeholders() const;
};

const PromptTemplate& prompt_registry(PromptId id);

// Substitutes every {placeholder}; no other mutation. Throws ConfigError
// "unbound placeholder: <name>" when a binding is missing.
std::string render_prompt(const PromptTemplate& tpl,
                          const std::map<std::string, std::string>& bindings);

struct ServiceConfig {
    std::string endpoint;  // e.g. http://127.0.0.1:8080/v1/chat/completions
    std::string model = "default";
    double temperature = 0.0;
    std::string api_token;
    int max_attempts = 3;
    int backoff_initial_ms = 250;
    int timeout_sec = 30;
    bool offline = false;        // forbid network; fail on cache miss
    size_t max_prompt_chars = 0; // 0 = no truncation; logged when it triggers
    int jobs = 1;

    // ENDPOINT_URL and API_TOKEN environment variables take precedence.
    void apply_env_overrides();
};

struct RawExtraction {
    std::string article_id;
    PromptId prompt_id = PromptId::P1Instances;
    std::string request_fingerprint;
    std::string response_text;
    std::string received_at;  // ISO-8601, informational only
};

// Content hash over (model, temperature, rendered prompt); identical inputs
// always produce the same fingerprint.
std::string request_fingerprint(const std::string& rendered_prompt, const std::string& model,
                                double temperature);

// One file per fingerprint under dir/<first two hex chars>/<fingerprint>.json.
// Concurrent readers are safe; writers are serialized and atomic.
class ExtractionCache {
  public:
    explicit ExtractionCache(std::filesystem::path dir);

    std::optional<RawExtraction> find(const std::string& fingerprint) const;
    void store(const RawExtraction& raw);

  private:
    std::filesystem::path path_for(const std::string& fingerprint) const;
    std::filesystem::path dir_;
    std::mutex write_mutex_;
};

// Chat-completion POST with bounded retries and exponential backoff. Returns
// the assistant message content; throws TransportError after exhausting
// attempts and ProtocolError when a 2xx body carries no content field.
class ServiceClient {
  public:
    explicit ServiceClient(const ServiceConfig& config);
    std::string complete(const std::string& prompt) const;

  private:
    ServiceConfig config_;
    std::string host_;
    int port_ = 80;
    std::string path_;
};

// Cache-aware extraction: a hit returns the cached response without touching
// the network; a miss calls the service and persists before returning. The
// {article} placeholder binds to the article body unless already supplied.
RawExtraction extract(const corpus::Article& article, PromptId prompt_id,
                      const std::map<std::string, std::string>& bindings,
                      const ServiceConfig& config, ExtractionCache& cache);

using RecordFields = std::map<std::string, std::string>;

struct ValidationReport {
    long long accepted = 0;
    long long rejected = 0;
    std::map<std::string, long long> reasons;
};

struct ParseResult {
    std::vector<RecordFields> records;
    ValidationReport report;
};

// Locates the first well-formed JSON object in the response (code fences and
// leading prose tolerated), pulls the schema's root array, and checks every
// record against the schema's enumerations. All-N_A sentinel records map to
// no records. An unparseable response is recorded in report.reasons without
// counting as a rejected record.
ParseResult parse_and_validate(const RawExtraction& raw, const PromptTemplate& tpl);

struct RecordKey {
    std::string article_id;
    std::string entity;
};

struct GoldComparison {
    long long true_positive = 0;
    long long false_positive = 0;
    long long false_negative = 0;
    long long true_negative = 0;
    std::optional<double> accuracy;
    std::optional<double> precision;
    std::optional<double> recall;
};

// Record identity is (article_id, entity normalized by trim/collapse/casefold).
// total_candidates < 0 means "just the union" (true negatives 0); otherwise
// TN = total_candidates - |predicted U gold|.
GoldComparison evaluate_against_gold(const std::vector<RecordKey>& predicted,
                                     const std::vector<RecordKey>& gold,
                                     long long total_candidates = -1);

}  // namespace newslens::extraction

#endif  // NEWSLENS_EXTRACTION_HPP
