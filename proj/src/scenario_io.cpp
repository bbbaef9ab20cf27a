#include "bird/scenario_io.hpp"

#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "bird/io_util.hpp"

namespace bird {

using nlohmann::json;

namespace {

json vector_to_json(const std::vector<float>& v) {
    json arr = json::array();
    for (float x : v) arr.push_back(static_cast<double>(x));
    return arr;
}

std::vector<float> vector_from_json(const json& arr, size_t expected_dim, size_t line_no) {
    if (!arr.is_array()) {
        throw Error(Errc::parse, "line " + std::to_string(line_no) + ": vector must be an array");
    }
    if (arr.size() != expected_dim) {
        throw Error(Errc::parse, "line " + std::to_string(line_no) + ": vector has dimension " +
                                     std::to_string(arr.size()) + ", header says " +
                                     std::to_string(expected_dim));
    }
    std::vector<float> v;
    v.reserve(arr.size());
    for (const auto& x : arr) {
        if (!x.is_number()) {
            throw Error(Errc::parse,
                        "line " + std::to_string(line_no) + ": non-numeric vector component");
        }
        const auto d = x.get<double>();
        if (!std::isfinite(d)) {
            throw Error(Errc::parse,
                        "line " + std::to_string(line_no) + ": non-finite vector component");
        }
        v.push_back(static_cast<float>(d));
    }
    return v;
}

}  // namespace

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
    std::string out;
    {
        json header = {{"type", "header"},
                       {"dimension", scenario.dim},
                       {"metric", to_string(scenario.metric)}};
        out += header.dump();
        out += '\n';
    }
    for (const auto& q : scenario.queries) {
        json rec = {{"type", "query"}, {"id", q.id}, {"vector", vector_to_json(q.vector)}};
        if (!q.answer_doc_ids.empty()) rec["answer_doc_ids"] = q.answer_doc_ids;
        out += rec.dump();
        out += '\n';
    }
    for (const auto& d : scenario.corpus) {
        json rec = {{"type", "doc"},
                    {"id", d.id},
                    {"label", to_string(d.label)},
                    {"vector", vector_to_json(d.vector)}};
        if (d.target_query_id) rec["target_query_id"] = *d.target_query_id;
        if (d.gold) rec["gold"] = true;
        out += rec.dump();
        out += '\n';
    }
    write_file_atomic(path, out);
}

Scenario load_scenario(const std::filesystem::path& path) {
    const std::string content = read_file(path);
    std::istringstream in(content);

    Scenario sc;
    bool have_header = false;
    std::unordered_set<std::string> doc_ids, query_ids;
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
        if (!rec.is_object() || !rec.contains("type") || !rec["type"].is_string()) {
            throw Error(Errc::parse,
                        "line " + std::to_string(line_no) + ": record needs a \"type\" field");
        }
        const std::string type = rec["type"].get<std::string>();

        if (type == "header") {
            if (have_header) {
                throw Error(Errc::parse, "line " + std::to_string(line_no) + ": duplicate header");
            }
            if (!rec.contains("dimension") || !rec["dimension"].is_number_unsigned() ||
                rec["dimension"].get<size_t>() == 0) {
                throw Error(Errc::parse, "line " + std::to_string(line_no) +
                                             ": header needs a positive \"dimension\"");
            }
            sc.dim = rec["dimension"].get<size_t>();
            sc.metric = metric_from_string(rec.value("metric", std::string("cosine")));
            have_header = true;
            continue;
        }
        if (!have_header) {
            throw Error(Errc::parse, "line " + std::to_string(line_no) +
                                         ": header record must come before " + type + " records");
        }
        if (!rec.contains("id") || !rec["id"].is_string() || rec["id"].get<std::string>().empty()) {
            throw Error(Errc::parse,
                        "line " + std::to_string(line_no) + ": record needs a non-empty \"id\"");
        }
        if (!rec.contains("vector")) {
            throw Error(Errc::parse, "line " + std::to_string(line_no) + ": record needs a vector");
        }

        if (type == "query") {
            Query q;
            q.id = rec["id"].get<std::string>();
            if (!query_ids.insert(q.id).second) {
                throw Error(Errc::parse,
                            "line " + std::to_string(line_no) + ": duplicate query id " + q.id);
            }
            q.vector = vector_from_json(rec["vector"], sc.dim, line_no);
            if (rec.contains("answer_doc_ids")) {
                for (const auto& a : rec["answer_doc_ids"]) {
                    q.answer_doc_ids.push_back(a.get<std::string>());
                }
            }
            sc.queries.push_back(std::move(q));
        } else if (type == "doc") {
            EmbeddedDocument d;
            d.id = rec["id"].get<std::string>();
            if (!doc_ids.insert(d.id).second) {
                throw Error(Errc::parse,
                            "line " + std::to_string(line_no) + ": duplicate doc id " + d.id);
            }
            d.vector = vector_from_json(rec["vector"], sc.dim, line_no);
            try {
                d.label = label_from_string(rec.value("label", std::string("benign")));
            } catch (const Error& e) {
                throw Error(Errc::parse, "line " + std::to_string(line_no) + ": " + e.what());
            }
            if (rec.contains("target_query_id")) {
                d.target_query_id = rec["target_query_id"].get<std::string>();
            }
            d.gold = rec.value("gold", false);
            sc.corpus.push_back(std::move(d));
        } else {
            throw Error(Errc::parse,
                        "line " + std::to_string(line_no) + ": unknown record type " + type);
        }
    }

    if (!have_header) {
        throw Error(Errc::parse, "scenario file has no header record: " + path.string());
    }

    for (const auto& d : sc.corpus) {
        if (d.target_query_id && !query_ids.count(*d.target_query_id)) {
            throw Error(Errc::parse, "document " + d.id + " targets unknown query " +
                                         *d.target_query_id);
        }
    }
    for (const auto& q : sc.queries) {
        if (!q.answer_doc_ids.empty()) {
            sc.gold_map.emplace(q.id, q.answer_doc_ids.front());
        }
    }
    return sc;
}

}  // namespace bird
