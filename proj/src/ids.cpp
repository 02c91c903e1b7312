#include "fedsim/ids.hpp"

#include <algorithm>
#include <cctype>

namespace fedsim {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::malformed: return "malformed";
    case Errc::malformed_document: return "malformed_document";
    case Errc::invalid_name: return "invalid_name";
    case Errc::name_taken: return "name_taken";
    case Errc::bad_credential: return "bad_credential";
    case Errc::unknown_actor: return "unknown_actor";
    case Errc::unknown_object: return "unknown_object";
    case Errc::unknown_subject: return "unknown_subject";
    case Errc::unknown_target: return "unknown_target";
    case Errc::unknown_attribute: return "unknown_attribute";
    case Errc::unknown_collection: return "unknown_collection";
    case Errc::unreachable: return "unreachable";
    case Errc::bad_token: return "bad_token";
    case Errc::replayed_nonce: return "replayed_nonce";
    case Errc::forbidden: return "forbidden";
    case Errc::forbidden_scope: return "forbidden_scope";
    case Errc::payload_too_large: return "payload_too_large";
    case Errc::stale_unavailable: return "stale_unavailable";
    case Errc::conflict_retry: return "conflict_retry";
    case Errc::self_follow: return "self_follow";
    case Errc::duplicate: return "duplicate";
    case Errc::quiescent: return "quiescent";
    case Errc::parse_error: return "parse_error";
    case Errc::assertion_failure: return "assertion_failure";
  }
  return "unknown_error";
}

namespace {

bool local_name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
}

}  // namespace

bool valid_local_name(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), local_name_char);
}

bool valid_domain(std::string_view s) {
  if (s.empty() || s.front() == '.' || s.back() == '.') return false;
  size_t label_len = 0;
  for (char c : s) {
    if (c == '.') {
      if (label_len == 0) return false;
      label_len = 0;
      continue;
    }
    bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
    if (!ok) return false;
    ++label_len;
  }
  return label_len > 0;
}

std::string SocialID::text() const {
  if (scheme == IdScheme::acct) return "acct:" + local + "@" + authority;
  return "https://" + authority + "/" + local;
}

std::string ObjectID::text() const { return authority + "/" + local; }

bool looks_like_social_id(std::string_view text) {
  return text.rfind("acct:", 0) == 0 || text.rfind("https://", 0) == 0;
}

Result<SocialID> parse_social_id(std::string_view text) {
  constexpr std::string_view kAcct = "acct:";
  constexpr std::string_view kUri = "https://";

  if (text.rfind(kAcct, 0) == 0) {
    std::string_view rest = text.substr(kAcct.size());
    size_t at = rest.find('@');
    if (at == std::string_view::npos) return Error(Errc::malformed, "missing '@'");
    std::string_view local = rest.substr(0, at);
    std::string_view authority = rest.substr(at + 1);
    if (!valid_local_name(local)) return Error(Errc::malformed, "bad local part");
    if (!valid_domain(authority)) return Error(Errc::malformed, "bad authority");
    return SocialID{IdScheme::acct, std::string(authority), std::string(local)};
  }
  if (text.rfind(kUri, 0) == 0) {
    std::string_view rest = text.substr(kUri.size());
    size_t slash = rest.find('/');
    if (slash == std::string_view::npos) return Error(Errc::malformed, "missing path");
    std::string_view authority = rest.substr(0, slash);
    std::string_view local = rest.substr(slash + 1);
    if (!valid_domain(authority)) return Error(Errc::malformed, "bad authority");
    if (!valid_local_name(local)) return Error(Errc::malformed, "bad local part");
    return SocialID{IdScheme::uri, std::string(authority), std::string(local)};
  }
  return Error(Errc::malformed, "unknown scheme");
}

Result<ObjectID> parse_object_id(std::string_view text) {
  size_t slash = text.find('/');
  if (slash == std::string_view::npos) return Error(Errc::malformed, "missing '/'");
  std::string_view authority = text.substr(0, slash);
  std::string_view local = text.substr(slash + 1);
  if (!valid_domain(authority)) return Error(Errc::malformed, "bad authority");
  if (local.empty()) return Error(Errc::malformed, "empty local part");
  return ObjectID{std::string(authority), std::string(local)};
}

}  // namespace fedsim
