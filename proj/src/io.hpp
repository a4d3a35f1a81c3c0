#pragma once

#include <map>
#include <string>

#include "certifier.hpp"
#include "flow_engine.hpp"
#include "monitors.hpp"
#include "oracle_suite.hpp"

namespace imcf {

// %.17g, with nan and inf spelled out.
std::string format_number(double v);

std::string certificate_text(const CertificateReport& rep);
std::string certificate_kv(const CertificateReport& rep);

std::string trajectory_csv(const Trajectory& traj);
std::string checkpoint_text(const FlowState& state);
FlowState parse_checkpoint(const std::string& text);

std::string monitors_text(const MonitorReport& rep);
std::string monitors_kv(const MonitorReport& rep);

std::string oracle_text(const OracleTable& table);
std::string oracle_kv(const OracleTable& table);

// Flat key-value files as written above; later duplicates are rejected.
std::map<std::string, std::string> parse_kv_file(const std::string& text);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace imcf
