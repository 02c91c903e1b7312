#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "fedsim/document.hpp"
#include "fedsim/result.hpp"

namespace fedsim {

using AuthTag = std::array<unsigned char, 32>;

// Per ordered site pair, derived deterministically from the run seed so that
// traces reproduce byte for byte.
using PairKey = std::array<unsigned char, 32>;

PairKey derive_pair_key(std::uint64_t seed, std::string_view from, std::string_view to);

AuthTag keyed_digest(const PairKey& key, std::string_view data);

struct Envelope {
  std::string from_site;
  std::string to_site;
  std::string endpoint;
  std::string message_id;  // "<domain>/<counter>", unique per sender
  std::string body;        // canonical document bytes
  AuthTag token{};
  std::uint64_t sent_tick = 0;

  Document header() const;
};

// The token authenticates the full frame prefix (length word, header bytes,
// body), so any byte perturbation outside the token itself flips verification.
std::string signing_input(const Envelope& env);
void sign_envelope(Envelope& env, const PairKey& key);
bool verify_envelope(const Envelope& env, const PairKey& key);

// On-the-wire layout: 4-byte big-endian body length, canonical header
// document, body bytes, 32-byte token.
std::string frame_encode(const Envelope& env);
Result<Envelope> frame_decode(std::string_view bytes);

// Numeric-aware ordering key for "<domain>/<counter>" message ids.
std::pair<std::string, std::uint64_t> split_message_id(std::string_view id);

}  // namespace fedsim
