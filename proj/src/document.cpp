#include "fedsim/document.hpp"

namespace fedsim {

std::string canonical_encode(const Document& doc) {
  return doc.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

Result<Document> canonical_decode(std::string_view bytes) {
  Document doc = Document::parse(bytes, nullptr, false);
  if (doc.is_discarded()) return Error(Errc::malformed_document, "invalid json");
  return doc;
}

std::string to_hex(std::string_view bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char c : bytes) {
    out.push_back(digits[c >> 4]);
    out.push_back(digits[c & 0xf]);
  }
  return out;
}

namespace {
int hex_val(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

Result<std::string> from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) return Error(Errc::malformed_document, "odd hex length");
  std::string out;
  out.reserve(hex.size() / 2);
  for (size_t i = 0; i < hex.size(); i += 2) {
    int hi = hex_val(hex[i]);
    int lo = hex_val(hex[i + 1]);
    if (hi < 0 || lo < 0) return Error(Errc::malformed_document, "bad hex digit");
    out.push_back(static_cast<char>((hi << 4) | lo));
  }
  return out;
}

}  // namespace fedsim
