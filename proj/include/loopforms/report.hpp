#ifndef LOOPFORMS_REPORT_HPP
#define LOOPFORMS_REPORT_HPP

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "loopforms/complexes.hpp"

namespace loopforms {
namespace cli {

inline constexpr const char* kVersion = "0.1.0";

struct Verdict {
    bool ok = false;
    std::string witness;
};

/* Stable output contract: top-level keys request / tables / verdicts /
 * version; rationals as strings "p" or "p/q"; identical invocations emit
 * byte-identical JSON (timing only appears when explicitly requested). */
struct ResultDocument {
    nlohmann::ordered_json request = nlohmann::ordered_json::object();
    std::vector<cx::DimRow> tables;
    std::vector<std::pair<std::string, Verdict>> verdicts;
    std::optional<long> timing_ms;
};

enum class Format { Text, Json };

nlohmann::ordered_json to_json(const ResultDocument& doc);
std::string emit(const ResultDocument& doc, Format fmt);

/* schema round-trip: parses what emit(Json) produced */
ResultDocument parse_result_document(const std::string& json_text);

}  // namespace cli
}  // namespace loopforms

#endif
