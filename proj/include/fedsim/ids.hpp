#pragma once

#include <string>
#include <string_view>
#include <tuple>

#include "fedsim/result.hpp"

namespace fedsim {

// Identifier scheme for actors. Both schemes name the same identity when
// (authority, local) match; equality and ordering ignore the scheme.
enum class IdScheme { acct, uri };

struct SocialID {
  IdScheme scheme = IdScheme::acct;
  std::string authority;  // home site domain, lowercase
  std::string local;      // [a-z0-9._-]+

  // Canonical text: "acct:<local>@<authority>" or "https://<authority>/<local>".
  std::string text() const;

  friend bool operator==(const SocialID& a, const SocialID& b) {
    return a.authority == b.authority && a.local == b.local;
  }
  friend bool operator!=(const SocialID& a, const SocialID& b) { return !(a == b); }
  friend bool operator<(const SocialID& a, const SocialID& b) {
    return std::tie(a.authority, a.local) < std::tie(b.authority, b.local);
  }
};

struct ObjectID {
  std::string authority;  // content site domain
  std::string local;      // opaque key, unique per site

  // Canonical text: "<authority>/<local>".
  std::string text() const;

  friend bool operator==(const ObjectID& a, const ObjectID& b) {
    return a.authority == b.authority && a.local == b.local;
  }
  friend bool operator!=(const ObjectID& a, const ObjectID& b) { return !(a == b); }
  friend bool operator<(const ObjectID& a, const ObjectID& b) {
    return std::tie(a.authority, a.local) < std::tie(b.authority, b.local);
  }
};

bool valid_domain(std::string_view s);
bool valid_local_name(std::string_view s);

Result<SocialID> parse_social_id(std::string_view text);
Result<ObjectID> parse_object_id(std::string_view text);

// Text is a SocialID in one of the two canonical forms (as opposed to an
// ObjectID or activity id).
bool looks_like_social_id(std::string_view text);

}  // namespace fedsim
