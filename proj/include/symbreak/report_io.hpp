#pragma once

#include <string>

#include <json.hpp>

#include "symbreak/extras.hpp"
#include "symbreak/fps.hpp"
#include "symbreak/spectrum.hpp"

namespace symbreak {

nlohmann::json to_json(const ReducedPoint& pt);
nlohmann::json to_json(const SpectrumReport& rep);
nlohmann::json to_json(const FPSExpansion& exp);
nlohmann::json to_json(const ContinuationPath& path);
nlohmann::json to_json(const GlobalMinComplexReport& rep);

std::string path_to_csv(const ContinuationPath& path);
std::string table_to_csv(const std::vector<TableRow>& rows);
std::string spectrum_to_csv(const SpectrumReport& rep);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace symbreak
