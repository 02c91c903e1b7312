#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "fedsim/result.hpp"

namespace fedsim {

// All structured data crossing a site boundary is a Document. nlohmann keeps
// object keys sorted, which the canonical encoding relies on.
using Document = nlohmann::json;

// Canonical bytes: UTF-8, lexicographically sorted keys, no insignificant
// whitespace. Injective on documents and stable across runs as long as
// documents stay free of floating point values.
std::string canonical_encode(const Document& doc);

Result<Document> canonical_decode(std::string_view bytes);

// Payload bytes travel hex-encoded inside documents.
std::string to_hex(std::string_view bytes);
Result<std::string> from_hex(std::string_view hex);

}  // namespace fedsim
