#pragma once

#include <optional>
#include <string>

#include "ppse/scenario.hpp"

namespace ppse {

enum class ReportFormat { Table, Json, Csv };

std::optional<ReportFormat> report_format_from_string(const std::string& s);

// Table output rounds to 6 decimals for humans; JSON and CSV carry full
// precision and stable key/column order.
std::string to_table(const RunReport& rep);
std::string to_json(const RunReport& rep);
std::string to_csv(const RunReport& rep);
std::string format_report(const RunReport& rep, ReportFormat f);

}  // namespace ppse
