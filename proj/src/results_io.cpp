#include "bird/results_io.hpp"

#include <cmath>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "bird/io_util.hpp"

namespace bird {

using nlohmann::json;

void save_results(std::span<const DefenseResult> results, const Scenario& scenario,
                  const std::filesystem::path& path) {
    std::unordered_map<std::string, Label> labels;
    labels.reserve(scenario.corpus.size());
    for (const auto& d : scenario.corpus) labels.emplace(d.id, d.label);

    std::string out;
    for (const auto& res : results) {
        json scored = json::array();
        for (const auto& sd : res.scored) {
            json rec = {{"doc_id", sd.doc_id},
                        {"fw_rank", sd.fw_rank},
                        {"r_cr", sd.r_cr},
                        {"r_cc", sd.r_cc},
                        {"verdict", sd.verdict == Verdict::kept ? "kept" : "filtered"}};
            if (std::isinf(sd.score)) {
                rec["score"] = "inf";
            } else {
                rec["score"] = sd.score;
            }
            auto it = labels.find(sd.doc_id);
            if (it != labels.end()) rec["label"] = to_string(it->second);
            scored.push_back(std::move(rec));
        }
        json line = {{"type", "result"},
                     {"query_id", res.query_id},
                     {"clean_ids", res.clean_ids},
                     {"scored", std::move(scored)}};
        out += line.dump();
        out += '\n';
    }
    write_file_atomic(path, out);
}

namespace {

double score_from_json(const json& v, size_t line_no) {
    if (v.is_string()) {
        if (v.get<std::string>() == "inf") return kInfiniteScore;
        throw Error(Errc::parse,
                    "line " + std::to_string(line_no) + ": unknown score sentinel");
    }
    if (!v.is_number()) {
        throw Error(Errc::parse, "line " + std::to_string(line_no) + ": score must be a number");
    }
    return v.get<double>();
}

}  // namespace

std::vector<DefenseResult> load_results(const std::filesystem::path& path) {
    const std::string content = read_file(path);
    std::istringstream in(content);
    std::vector<DefenseResult> results;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw Error(Errc::parse,
                        "line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
        }
        if (rec.value("type", std::string()) != "result") {
            throw Error(Errc::parse,
                        "line " + std::to_string(line_no) + ": expected a result record");
        }
        DefenseResult res;
        res.query_id = rec.at("query_id").get<std::string>();
        for (const auto& c : rec.at("clean_ids")) {
            res.clean_ids.push_back(c.get<std::string>());
        }
        for (const auto& s : rec.at("scored")) {
            ScoredDocument sd;
            sd.doc_id = s.at("doc_id").get<std::string>();
            sd.fw_rank = s.at("fw_rank").get<size_t>();
            sd.r_cr = s.at("r_cr").get<double>();
            sd.r_cc = s.at("r_cc").get<double>();
            sd.score = score_from_json(s.at("score"), line_no);
            sd.verdict =
                s.at("verdict").get<std::string>() == "kept" ? Verdict::kept : Verdict::filtered;
            res.scored.push_back(std::move(sd));
        }
        results.push_back(std::move(res));
    }
    return results;
}

LabeledScores load_labeled_scores(const std::filesystem::path& path) {
    const std::string content = read_file(path);
    std::istringstream in(content);
    LabeledScores out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw Error(Errc::parse,
                        "line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
        }
        if (!rec.contains("scored")) continue;
        for (const auto& s : rec["scored"]) {
            if (!s.contains("label")) continue;
            const double score = score_from_json(s.at("score"), line_no);
            if (label_from_string(s["label"].get<std::string>()) == Label::poison) {
                out.poison.push_back(score);
            } else {
                out.benign.push_back(score);
            }
        }
    }
    return out;
}

}  // namespace bird
