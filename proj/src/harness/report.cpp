#include "greid/harness/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "greid/error.hpp"

namespace greid::harness {

using nlohmann::json;

namespace {

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

std::string report_csv(const CmcReport& r) {
    std::string out = "rank,split,rate\n";
    for (std::size_t s = 0; s < r.split_rates.size(); ++s)
        for (std::size_t k = 0; k < r.ranks.size(); ++k)
            out += std::to_string(r.ranks[k]) + "," + std::to_string(s) + "," + fixed(r.split_rates[s][k]) + "\n";
    for (std::size_t k = 0; k < r.ranks.size(); ++k)
        out += std::to_string(r.ranks[k]) + ",mean," + fixed(r.mean[k]) + "\n";
    return out;
}

std::string report_json(const CmcReport& r) {
    json doc;
    doc["variant"] = r.variant;
    doc["ranks"] = r.ranks;
    doc["splits"] = r.split_rates;
    doc["mean"] = r.mean;
    doc["pairs"] = r.pairs;
    doc["excluded_probes"] = r.excluded_probes;
    doc["seconds_per_pair"] = r.seconds_per_pair;
    return doc.dump(2) + "\n";
}

CmcReport parse_report_json(const std::string& text) {
    try {
        const json doc = json::parse(text);
        CmcReport r;
        r.variant = doc.at("variant").get<std::string>();
        r.ranks = doc.at("ranks").get<std::vector<int>>();
        r.split_rates = doc.at("splits").get<std::vector<std::vector<double>>>();
        r.mean = doc.at("mean").get<std::vector<double>>();
        r.pairs = doc.at("pairs").get<std::size_t>();
        r.excluded_probes = doc.at("excluded_probes").get<std::size_t>();
        r.seconds_per_pair = doc.at("seconds_per_pair").get<double>();
        return r;
    } catch (const json::exception& e) {
        throw Error("invalid-report", e.what());
    }
}

ReportFormat format_for_report(const std::filesystem::path& path) {
    return path.extension() == ".csv" ? ReportFormat::csv : ReportFormat::structured;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("unwritable-path", "cannot write " + path.string(), ErrorKind::runtime);
    out << content;
    if (!out) throw Error("unwritable-path", "cannot write " + path.string(), ErrorKind::runtime);
}

void emit_report(const CmcReport& report, const std::filesystem::path& path, ReportFormat format) {
    write_text_file(path, format == ReportFormat::csv ? report_csv(report) : report_json(report));
}

CmcReport load_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("missing-file", "cannot read " + path.string(), ErrorKind::runtime);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_report_json(buf.str());
}

std::string match_result_json(const MatchResult& r, const std::string& probe_id, const std::string& gallery_id) {
    json doc;
    doc["probe"] = probe_id;
    doc["gallery"] = gallery_id;
    doc["mapping"] = json::array();
    for (const auto& c : r.mapping.pairs) doc["mapping"].push_back({c.probe_person, c.gallery_person});
    doc["objective"] = r.objective;
    doc["fused_score"] = r.fused_score;
    doc["per_order"] = {{"first", r.per_order.first},   {"second", r.per_order.second},
                        {"third", r.per_order.third},   {"global", r.per_order.global},
                        {"inter", r.per_order.inter}};
    doc["matched_term"] = r.score_terms.matched_term;
    doc["unmatched_term"] = r.score_terms.unmatched_term;
    doc["rw_iterations"] = r.rw_iterations;
    doc["degenerate"] = r.degenerate;
    return doc.dump(2);
}

}  // namespace greid::harness
