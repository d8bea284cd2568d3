#pragma once

#include <string>

#include <json.hpp>

#include "levykato/classifier.hpp"
#include "levykato/kato.hpp"
#include "levykato/montecarlo.hpp"

namespace levykato {

// All on-disk documents carry {"schema_version": 1}; parsers reject missing
// or newer versions. Malformed input throws InvalidSpec with a diagnostic.
inline constexpr int kSchemaVersion = 1;

ProcessSpec parse_process_spec(const nlohmann::json& j);
Potential parse_potential(const nlohmann::json& j);

ProcessSpec load_process_spec(const std::string& path);
Potential load_potential(const std::string& path);

nlohmann::json classification_json(const Classification& c);
nlohmann::json profile_json(const Profile& p);
nlohmann::json verdict_json(const KatoVerdict& v);
nlohmann::json estimate_json(const MCEstimate& e);
nlohmann::json diagnostic_json(const DivergenceDiagnostic& d);

// CSV with header "x,value,err"
void write_kernel_csv(const KernelGrid& k, const std::string& path);

} // namespace levykato
