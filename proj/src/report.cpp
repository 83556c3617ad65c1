#include "loopforms/report.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace loopforms {
namespace cli {

nlohmann::ordered_json to_json(const ResultDocument& doc)
{
    nlohmann::ordered_json j;
    j["request"] = doc.request;
    nlohmann::ordered_json tables = nlohmann::ordered_json::array();
    std::vector<cx::DimRow> rows = doc.tables;
    std::sort(rows.begin(), rows.end(), [](const cx::DimRow& a, const cx::DimRow& b) {
        if (a.deg != b.deg)
            return a.deg > b.deg;
        return a.weight < b.weight;
    });
    for (const auto& r : rows) {
        nlohmann::ordered_json row;
        row["degree"] = r.deg;
        row["weight"] = r.weight;
        row["dim"] = r.dim;
        tables.push_back(row);
    }
    j["tables"] = tables;
    nlohmann::ordered_json verdicts = nlohmann::ordered_json::object();
    std::vector<std::pair<std::string, Verdict>> vs = doc.verdicts;
    std::sort(vs.begin(), vs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [name, v] : vs) {
        nlohmann::ordered_json entry;
        entry["ok"] = v.ok;
        entry["witness"] = v.witness;
        verdicts[name] = entry;
    }
    j["verdicts"] = verdicts;
    j["version"] = kVersion;
    if (doc.timing_ms)
        j["timing_ms"] = *doc.timing_ms;
    return j;
}

std::string emit(const ResultDocument& doc, Format fmt)
{
    if (fmt == Format::Json)
        return to_json(doc).dump(2) + "\n";

    std::ostringstream os;
    os << "request:";
    for (auto it = doc.request.begin(); it != doc.request.end(); ++it)
        os << " " << it.key() << "=" << it.value().dump();
    os << "\n";
    if (!doc.tables.empty()) {
        std::vector<cx::DimRow> rows = doc.tables;
        std::sort(rows.begin(), rows.end(), [](const cx::DimRow& a, const cx::DimRow& b) {
            if (a.deg != b.deg)
                return a.deg > b.deg;
            return a.weight < b.weight;
        });
        os << "degree  weight  dim\n";
        for (const auto& r : rows)
            os << std::setw(6) << r.deg << "  " << std::setw(6) << r.weight << "  " << std::setw(3)
               << r.dim << "\n";
    }
    if (!doc.verdicts.empty()) {
        std::vector<std::pair<std::string, Verdict>> vs = doc.verdicts;
        std::sort(vs.begin(), vs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [name, v] : vs) {
            os << name << ": " << (v.ok ? "true" : "false");
            if (!v.witness.empty())
                os << "  [" << v.witness << "]";
            os << "\n";
        }
    }
    if (doc.timing_ms)
        os << "elapsed: " << *doc.timing_ms << " ms\n";
    return os.str();
}

ResultDocument parse_result_document(const std::string& json_text)
{
    nlohmann::ordered_json j = nlohmann::ordered_json::parse(json_text);
    ResultDocument doc;
    doc.request = j.at("request");
    for (const auto& row : j.at("tables")) {
        cx::DimRow r{row.at("degree").get<int>(), row.at("weight").get<int>(), row.at("dim").get<int>()};
        if (r.dim < 0)
            throw std::invalid_argument("negative dimension in result document");
        doc.tables.push_back(r);
    }
    for (auto it = j.at("verdicts").begin(); it != j.at("verdicts").end(); ++it)
        doc.verdicts.push_back(
            {it.key(), Verdict{it.value().at("ok").get<bool>(), it.value().at("witness").get<std::string>()}});
    if (j.contains("timing_ms"))
        doc.timing_ms = j.at("timing_ms").get<long>();
    return doc;
}

}  // namespace cli
}  // namespace loopforms
