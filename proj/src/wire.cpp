#include "fedsim/wire.hpp"

#include <openssl/hmac.h>

#include <cstring>

namespace fedsim {

namespace {

AuthTag hmac_sha256(const unsigned char* key, size_t key_len, std::string_view data) {
  AuthTag out{};
  unsigned int out_len = 0;
  HMAC(EVP_sha256(), key, static_cast<int>(key_len),
       reinterpret_cast<const unsigned char*>(data.data()), data.size(), out.data(),
       &out_len);
  return out;
}

void put_u32_be(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>((v >> 24) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>(v & 0xff));
}

}  // namespace

PairKey derive_pair_key(std::uint64_t seed, std::string_view from, std::string_view to) {
  unsigned char seed_bytes[8];
  for (int i = 0; i < 8; ++i) seed_bytes[i] = static_cast<unsigned char>(seed >> (8 * i));
  std::string label = "site-pair:";
  label.append(from);
  label.push_back('>');
  label.append(to);
  return hmac_sha256(seed_bytes, sizeof(seed_bytes), label);
}

AuthTag keyed_digest(const PairKey& key, std::string_view data) {
  return hmac_sha256(key.data(), key.size(), data);
}

Document Envelope::header() const {
  Document doc = Document::object();
  doc["endpoint"] = endpoint;
  doc["from"] = from_site;
  doc["message_id"] = message_id;
  doc["sent_tick"] = sent_tick;
  doc["to"] = to_site;
  return doc;
}

std::string signing_input(const Envelope& env) {
  std::string input;
  put_u32_be(input, static_cast<std::uint32_t>(env.body.size()));
  input += canonical_encode(env.header());
  input += env.body;
  return input;
}

void sign_envelope(Envelope& env, const PairKey& key) {
  env.token = keyed_digest(key, signing_input(env));
}

bool verify_envelope(const Envelope& env, const PairKey& key) {
  return keyed_digest(key, signing_input(env)) == env.token;
}

std::string frame_encode(const Envelope& env) {
  std::string frame = signing_input(env);
  frame.append(reinterpret_cast<const char*>(env.token.data()), env.token.size());
  return frame;
}

Result<Envelope> frame_decode(std::string_view bytes) {
  if (bytes.size() < 4 + 32) return Error(Errc::malformed_document, "short frame");
  std::uint32_t body_len = (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[0])) << 24) |
                           (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[1])) << 16) |
                           (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[2])) << 8) |
                           static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[3]));
  if (bytes.size() < 4ull + body_len + 32ull) return Error(Errc::malformed_document, "truncated frame");
  size_t header_len = bytes.size() - 4 - body_len - 32;
  if (header_len == 0) return Error(Errc::malformed_document, "missing header");
  std::string_view header_bytes = bytes.substr(4, header_len);
  auto header = canonical_decode(header_bytes);
  if (!header) return header.error();
  const Document& doc = header.value();
  for (const char* field : {"endpoint", "from", "message_id", "sent_tick", "to"}) {
    if (!doc.contains(field)) return Error(Errc::malformed_document, field);
  }
  Envelope env;
  env.endpoint = doc["endpoint"].get<std::string>();
  env.from_site = doc["from"].get<std::string>();
  env.message_id = doc["message_id"].get<std::string>();
  env.sent_tick = doc["sent_tick"].get<std::uint64_t>();
  env.to_site = doc["to"].get<std::string>();
  env.body = std::string(bytes.substr(4 + header_len, body_len));
  std::memcpy(env.token.data(), bytes.data() + bytes.size() - 32, 32);
  return env;
}

std::pair<std::string, std::uint64_t> split_message_id(std::string_view id) {
  size_t slash = id.rfind('/');
  if (slash == std::string_view::npos) return {std::string(id), 0};
  std::uint64_t counter = 0;
  for (char c : id.substr(slash + 1)) {
    if (c < '0' || c > '9') return {std::string(id), 0};
    counter = counter * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return {std::string(id.substr(0, slash)), counter};
}

}  // namespace fedsim
