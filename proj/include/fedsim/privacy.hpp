#pragma once

#include <optional>
#include <set>
#include <string>
#include <variant>

#include "fedsim/ids.hpp"
#include "fedsim/model.hpp"
#include "fedsim/result.hpp"

namespace fedsim {

struct SiteNode;
struct Session;
class Simulation;

// What a profile owner lets one remote site see and touch. "minimal" is
// exactly {name}; writable names must be recognized or "x-" extensions.
struct ScopeGrant {
  enum class ReadLevel { none, minimal, full, custom };

  SocialID grantor;
  std::string grantee_site;
  ReadLevel read_level = ReadLevel::none;
  std::set<std::string> readable_attributes;  // used when read_level == custom
  std::set<std::string> writable_attributes;
  bool collections_readable = false;
  bool contacts_readable = false;

  bool can_read_attribute(std::string_view name) const;
  bool can_write_attribute(std::string_view name) const;
};

Status validate_grant(const ScopeGrant& grant);

enum class DenyReason { not_in_audience, no_scope, not_follower };
const char* to_string(DenyReason r);

struct Decision {
  bool allow = false;
  DenyReason reason = DenyReason::no_scope;

  static Decision allowed() { return {true, DenyReason::no_scope}; }
  static Decision denied(DenyReason r) { return {false, r}; }
};

enum class AccessAction { read, write };
const char* to_string(AccessAction a);

// Who is asking: an actor, or a remote site acting for itself.
struct Principal {
  std::optional<SocialID> actor;
  std::string site;

  static Principal for_actor(SocialID id, std::string via_site) {
    return {std::move(id), std::move(via_site)};
  }
  static Principal for_site(std::string domain) { return {std::nullopt, std::move(domain)}; }
  std::string text() const;
};

struct ProfileScope {
  SocialID subject;
  std::string attribute;  // "*" for the whole profile surface
};

using Resource = std::variant<ObjectID, ProfileScope>;
std::string resource_text(const Resource& r);

namespace privacy {

// Stores a grant at the grantor's home site, replacing any prior grant for the
// same grantee site.
Status grant_scope(Simulation& sim, const Session& session, ScopeGrant grant);

// Single decision point. Pure over the serving site's current knowledge:
// object audiences as stored there, scope grants as stored there, and the
// follower graph as known there.
Decision authorize(const SiteNode& serving_site, const Principal& who,
                   const Resource& what, AccessAction action);

const ScopeGrant* find_grant(const SiteNode& home, const SocialID& grantor,
                             const std::string& grantee_site);

// Attribute view of a profile under a grant; nullptr grant means deny-by-default
// (empty view).
std::map<std::string, std::string> filter_attributes(const ProfileDoc& profile,
                                                     const ScopeGrant* grant);

// Serving-site knowledge of "x follows owner".
bool knows_follower(const SiteNode& site, const SocialID& follower, const SocialID& owner);

}  // namespace privacy

}  // namespace fedsim
