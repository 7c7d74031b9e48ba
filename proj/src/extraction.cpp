#include "newslens/extraction.hpp"

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <set>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "newslens/io.hpp"

using json = nlohmann::json;

namespace newslens::extraction {

std::vector<std::string> PromptTemplate::placeholders() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (size_t i = 0; i < template_text.size(); ++i) {
        if (template_text[i] != '{') continue;
        if (i + 1 < template_text.size() && template_text[i + 1] == '{') {
            ++i;
            continue;
        }
        size_t close = template_text.find('}', i);
        if (close == std::string::npos) break;
        std::string name = template_text.substr(i + 1, close - i - 1);
        if (seen.insert(name).second) out.push_back(name);
        i = close;
    }
    return out;
}

std::string render_prompt(const PromptTemplate& tpl,
                          const std::map<std::string, std::string>& bindings) {
    const std::string& t = tpl.template_text;
    std::string out;
    out.reserve(t.size());
    for (size_t i = 0; i < t.size(); ++i) {
        char c = t[i];
        if (c == '{') {
            if (i + 1 < t.size() && t[i + 1] == '{') {
                out.push_back('{');
                ++i;
                continue;
            }
            size_t close = t.find('}', i);
            if (close == std::string::npos) throw ConfigError("unterminated placeholder");
            std::string name = t.substr(i + 1, close - i - 1);
            auto it = bindings.find(name);
            if (it == bindings.end()) throw ConfigError("unbound placeholder: " + name);
            out += it->second;
            i = close;
        } else if (c == '}') {
            if (i + 1 < t.size() && t[i + 1] == '}') {
                out.push_back('}');
                ++i;
                continue;
            }
            out.push_back('}');
        } else {
            out.push_back(c);
        }
    }
    return out;
}

void ServiceConfig::apply_env_overrides() {
    if (const char* e = std::getenv("ENDPOINT_URL"); e && *e) endpoint = e;
    if (const char* t = std::getenv("API_TOKEN"); t && *t) api_token = t;
}

std::string request_fingerprint(const std::string& rendered_prompt, const std::string& model,
                                double temperature) {
    char temp[32];
    std::snprintf(temp, sizeof(temp), "%.6g", temperature);
    std::string material = model;
    material.push_back('\n');
    material += temp;
    material.push_back('\n');
    material += rendered_prompt;
    return sha256_hex(material);
}

ExtractionCache::ExtractionCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::filesystem::path ExtractionCache::path_for(const std::string& fingerprint) const {
    return dir_ / fingerprint.substr(0, 2) / (fingerprint + ".json");
}

std::optional<RawExtraction> ExtractionCache::find(const std::string& fingerprint) const {
    auto path = path_for(fingerprint);
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return std::nullopt;
    json j = json::parse(io::read_file(path), nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    RawExtraction raw;
    raw.article_id = j.value("article_id", "");
    auto pid = parse_prompt_id(j.value("prompt_id", ""));
    raw.prompt_id = pid.value_or(PromptId::P1Instances);
    raw.request_fingerprint = j.value("request_fingerprint", "");
    raw.response_text = j.value("response_text", "");
    raw.received_at = j.value("received_at", "");
    if (raw.request_fingerprint != fingerprint) return std::nullopt;
    return raw;
}

void ExtractionCache::store(const RawExtraction& raw) {
    json j;
    j["article_id"] = raw.article_id;
    j["prompt_id"] = prompt_id_name(raw.prompt_id);
    j["request_fingerprint"] = raw.request_fingerprint;
    j["response_text"] = raw.response_text;
    j["received_at"] = raw.received_at;
    std::lock_guard<std::mutex> lock(write_mutex_);
    io::write_file_atomic(path_for(raw.request_fingerprint), j.dump());
}

namespace {

// Splits "http://host:port/path"; https endpoints are out of scope for the
// bundled client.
void split_endpoint(const std::string& endpoint, std::string& host, int& port,
                    std::string& path) {
    std::string rest = endpoint;
    const std::string scheme = "http://";
    if (rest.rfind(scheme, 0) == 0) rest = rest.substr(scheme.size());
    size_t slash = rest.find('/');
    path = (slash == std::string::npos) ? "/" : rest.substr(slash);
    std::string hostport = rest.substr(0, slash);
    size_t colon = hostport.find(':');
    if (colon == std::string::npos) {
        host = hostport;
        port = 80;
    } else {
        host = hostport.substr(0, colon);
        port = std::stoi(hostport.substr(colon + 1));
    }
}

std::string now_iso8601() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Returns the first balanced JSON object substring, skipping code fences and
// leading prose; string literals and escapes are respected.
std::optional<std::string> first_json_object(const std::string& text) {
    for (size_t start = text.find('{'); start != std::string::npos;
         start = text.find('{', start + 1)) {
        int depth = 0;
        bool in_string = false;
        for (size_t i = start; i < text.size(); ++i) {
            char c = text[i];
            if (in_string) {
                if (c == '\\')
                    ++i;
                else if (c == '"')
                    in_string = false;
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                --depth;
                if (depth == 0) {
                    std::string candidate = text.substr(start, i - start + 1);
                    json j = json::parse(candidate, nullptr, false);
                    if (!j.is_discarded() && j.is_object()) return candidate;
                    break;  // balanced but invalid; try the next '{'
                }
            }
        }
    }
    return std::nullopt;
}

std::string value_to_string(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_float()) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", v.get<double>());
        return buf;
    }
    return v.dump();
}

}  // namespace

ServiceClient::ServiceClient(const ServiceConfig& config) : config_(config) {
    if (config_.endpoint.empty()) throw ConfigError("service endpoint not configured");
    split_endpoint(config_.endpoint, host_, port_, path_);
}

std::string ServiceClient::complete(const std::string& prompt) const {
    json body;
    body["model"] = config_.model;
    body["messages"] = json::array({json{{"role", "user"}, {"content", prompt}}});
    body["temperature"] = config_.temperature;
    const std::string payload = body.dump();

    int last_status = 0;
    std::string last_error = "no attempts made";
    for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
        if (attempt > 0) {
            long ms = static_cast<long>(config_.backoff_initial_ms) * (1L << (attempt - 1));
            std::this_thread::sleep_for(std::chrono::milliseconds(ms));
        }
        httplib::Client client(host_, port_);
        client.set_connection_timeout(config_.timeout_sec, 0);
        client.set_read_timeout(config_.timeout_sec, 0);
        httplib::Headers headers;
        if (!config_.api_token.empty())
            headers.emplace("Authorization", "Bearer " + config_.api_token);
        auto res = client.Post(path_, headers, payload, "application/json");
        if (!res) {
            last_status = 0;
            last_error = "connection failed: " + httplib::to_string(res.error());
            continue;
        }
        last_status = res->status;
        if (res->status < 200 || res->status >= 300) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        json j = json::parse(res->body, nullptr, false);
        if (j.is_discarded()) {
            last_error = "response body is not JSON";
            continue;
        }
        // chat-completion style first, simpler shapes tolerated
        if (j.contains("choices") && j["choices"].is_array() && !j["choices"].empty()) {
            const auto& choice = j["choices"][0];
            if (choice.contains("message") && choice["message"].contains("content") &&
                choice["message"]["content"].is_string())
                return choice["message"]["content"].get<std::string>();
        }
        if (j.contains("message") && j["message"].is_object() &&
            j["message"].contains("content") && j["message"]["content"].is_string())
            return j["message"]["content"].get<std::string>();
        if (j.contains("content") && j["content"].is_string())
            return j["content"].get<std::string>();
        throw ProtocolError("service response carries no assistant message content");
    }
    throw TransportError("service call failed after " + std::to_string(config_.max_attempts) +
                             " attempts: " + last_error,
                         last_status);
}

RawExtraction extract(const corpus::Article& article, PromptId prompt_id,
                      const std::map<std::string, std::string>& bindings,
                      const ServiceConfig& config, ExtractionCache& cache) {
    const PromptTemplate& tpl = prompt_registry(prompt_id);
    std::map<std::string, std::string> bound = bindings;
    if (!bound.count("article")) bound["article"] = article.body;
    if (config.max_prompt_chars > 0) {
        for (auto& [k, v] : bound) {
            if (v.size() > config.max_prompt_chars) {
                std::cerr << "newslens: truncating binding '" << k << "' for article "
                          << article.id << " (" << v.size() << " -> "
                          << config.max_prompt_chars << " chars)\n";
                v.resize(config.max_prompt_chars);
            }
        }
    }
    const std::string prompt = render_prompt(tpl, bound);
    const std::string fingerprint =
        request_fingerprint(prompt, config.model, config.temperature);

    if (auto cached = cache.find(fingerprint)) return *cached;
    if (config.offline)
        throw TransportError("offline mode: cache miss for article " + article.id, 0);

    ServiceClient client(config);
    RawExtraction raw;
    raw.article_id = article.id;
    raw.prompt_id = prompt_id;
    raw.request_fingerprint = fingerprint;
    raw.response_text = client.complete(prompt);
    raw.received_at = now_iso8601();
    cache.store(raw);
    return raw;
}

ParseResult parse_and_validate(const RawExtraction& raw, const PromptTemplate& tpl) {
    ParseResult out;
    auto obj_text = first_json_object(raw.response_text);
    if (!obj_text) {
        out.report.reasons["unparseable response"] += 1;
        return out;
    }
    json j = json::parse(*obj_text);
    if (!j.contains(tpl.root_field) || !j[tpl.root_field].is_array()) {
        out.report.reasons["missing root array: " + tpl.root_field] += 1;
        return out;
    }
    for (const auto& rec : j[tpl.root_field]) {
        if (!rec.is_object()) {
            out.report.rejected += 1;
            out.report.reasons["record is not an object"] += 1;
            continue;
        }
        RecordFields fields;
        std::optional<std::string> reject_reason;
        bool all_na = true;
        for (const auto& fs : tpl.response_schema) {
            if (!rec.contains(fs.name)) {
                reject_reason = "missing field: " + fs.name;
                break;
            }
            std::string value = str::trim(value_to_string(rec[fs.name]));
            if (value != "N_A") all_na = false;
            fields[fs.name] = value;
        }
        if (!reject_reason && all_na) continue;  // sentinel: no instances found
        if (!reject_reason) {
            for (const auto& fs : tpl.response_schema) {
                if (fs.allowed.empty()) continue;
                const std::string& value = fields[fs.name];
                bool ok = false;
                for (const auto& a : fs.allowed)
                    if (value == a) {
                        ok = true;
                        break;
                    }
                if (!ok) {
                    reject_reason = "unknown enum value: " + fs.name;
                    break;
                }
            }
        }
        if (reject_reason) {
            out.report.rejected += 1;
            out.report.reasons[*reject_reason] += 1;
        } else {
            out.report.accepted += 1;
            out.records.push_back(std::move(fields));
        }
    }
    return out;
}

GoldComparison evaluate_against_gold(const std::vector<RecordKey>& predicted,
                                     const std::vector<RecordKey>& gold,
                                     long long total_candidates) {
    auto normalize = [](const std::vector<RecordKey>& keys) {
        std::set<std::pair<std::string, std::string>> out;
        for (const auto& k : keys) out.insert({k.article_id, str::normalize_key(k.entity)});
        return out;
    };
    auto p = normalize(predicted);
    auto g = normalize(gold);

    GoldComparison cmp;
    for (const auto& k : p)
        (g.count(k) ? cmp.true_positive : cmp.false_positive) += 1;
    for (const auto& k : g)
        if (!p.count(k)) cmp.false_negative += 1;
    long long union_size = cmp.true_positive + cmp.false_positive + cmp.false_negative;
    if (total_candidates >= 0) {
        if (total_candidates < union_size)
            throw InputError("total_candidates smaller than |predicted U gold|");
        cmp.true_negative = total_candidates - union_size;
    }
    long long total = union_size + cmp.true_negative;
    if (total > 0)
        cmp.accuracy = static_cast<double>(cmp.true_positive + cmp.true_negative) /
                       static_cast<double>(total);
    if (cmp.true_positive + cmp.false_positive > 0)
        cmp.precision = static_cast<double>(cmp.true_positive) /
                        static_cast<double>(cmp.true_positive + cmp.false_positive);
    if (cmp.true_positive + cmp.false_negative > 0)
        cmp.recall = static_cast<double>(cmp.true_positive) /
                     static_cast<double>(cmp.true_positive + cmp.false_negative);
    return cmp;
}

}  // namespace newslens::extraction
