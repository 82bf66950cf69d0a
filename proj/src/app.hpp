#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "souvlaki/graph_json.hpp"

namespace souvlaki::app {

inline constexpr const char* kToolName = "souvlaki";
inline constexpr const char* kToolVersion = "0.1.0";

/// Wraps a result payload with the metadata needed to reproduce it.
Json envelope(const std::string& operation, const std::vector<std::string>& command, Json parameters,
              std::vector<std::uint64_t> seeds, Json result);

const std::vector<std::string>& suite_names();

/// Computes one suite and writes <dir>/<suite>.json plus its CSV curves.
/// Returns the list of files written, in write order.
std::vector<std::string> report_suite(const std::string& name, const std::string& dir, std::uint64_t seed,
                                      const std::vector<std::string>& command);

/// Exit code 0 on success, 1 on a domain error, 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace souvlaki::app
