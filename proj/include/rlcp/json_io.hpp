#pragma once

#include <string>

#include "rlcp/model.hpp"

namespace rlcp {

// "ulcp-v1" problem files. Readers reject NaN/Inf entries and dimension
// mismatches with structured errors.
UncertainLCP read_ulcp_json(const std::string& text);
UncertainLCP load_ulcp_file(const std::string& path);
std::string write_ulcp_json(const UncertainLCP& problem);

// point files: {"x": [...]}
Vector read_point_json(const std::string& text);
Vector load_point_file(const std::string& path);

}  // namespace rlcp
