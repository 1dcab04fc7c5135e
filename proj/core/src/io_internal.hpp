#pragma once

#include <json.hpp>
#include <string>

#include "cdmgen/errors.hpp"
#include "cdmgen/io.hpp"

namespace cdmgen::io::detail {

using Json = nlohmann::json;

inline Json parse_json(std::string_view text, std::size_t row) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), row, e.byte);
  }
}

inline void check_version(const Json& header, const char* format, std::size_t row) {
  if (!header.is_object() || header.value("FORMAT", std::string()) != format) {
    throw ParseError(std::string("expected a ") + format + " header", row);
  }
  if (header.value("VERSION", -1) != kFormatVersion) throw ParseError(std::string("unsupported ") + format + " version", row);
}

}  // namespace cdmgen::io::detail
