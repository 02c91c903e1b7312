#include "fedsim/privacy.hpp"

#include "fedsim/simulation.hpp"
#include "fedsim/site.hpp"

namespace fedsim {

const char* to_string(DenyReason r) {
  switch (r) {
    case DenyReason::not_in_audience: return "not_in_audience";
    case DenyReason::no_scope: return "no_scope";
    case DenyReason::not_follower: return "not_follower";
  }
  return "?";
}

const char* to_string(AccessAction a) { return a == AccessAction::read ? "read" : "write"; }

std::string Principal::text() const {
  if (actor) return actor->text();
  return "site:" + site;
}

std::string resource_text(const Resource& r) {
  if (std::holds_alternative<ObjectID>(r)) return std::get<ObjectID>(r).text();
  const auto& scope = std::get<ProfileScope>(r);
  return "profile:" + scope.subject.text() + "#" + scope.attribute;
}

bool ScopeGrant::can_read_attribute(std::string_view name) const {
  switch (read_level) {
    case ReadLevel::none: return false;
    case ReadLevel::full: return true;
    case ReadLevel::minimal: return name == "name";
    case ReadLevel::custom: return readable_attributes.count(std::string(name)) > 0;
  }
  return false;
}

bool ScopeGrant::can_write_attribute(std::string_view name) const {
  return writable_attributes.count(std::string(name)) > 0;
}

Status validate_grant(const ScopeGrant& grant) {
  for (const auto& name : grant.writable_attributes) {
    if (!recognized_attribute(name)) {
      return Error(Errc::unknown_attribute, "writable " + name);
    }
  }
  if (grant.read_level == ScopeGrant::ReadLevel::custom) {
    for (const auto& name : grant.readable_attributes) {
      if (!recognized_attribute(name)) {
        return Error(Errc::unknown_attribute, "readable " + name);
      }
    }
  }
  return ok_status();
}

namespace privacy {

Status grant_scope(Simulation& sim, const Session& session, ScopeGrant grant) {
  if (session.actor != grant.grantor || session.site != grant.grantor.authority ||
      session.kind != ActorKind::native) {
    return Error(Errc::forbidden, "grants are issued by the grantor at the home site");
  }
  if (auto valid = validate_grant(grant); !valid) return valid.error();
  SiteNode& home = sim.site(session.site);
  // Supersedes any prior grant for the same grantee site.
  home.grants[{grant.grantor.text(), grant.grantee_site}] = std::move(grant);
  return ok_status();
}

const ScopeGrant* find_grant(const SiteNode& home, const SocialID& grantor,
                             const std::string& grantee_site) {
  auto it = home.grants.find({grantor.text(), grantee_site});
  return it == home.grants.end() ? nullptr : &it->second;
}

std::map<std::string, std::string> filter_attributes(const ProfileDoc& profile,
                                                     const ScopeGrant* grant) {
  std::map<std::string, std::string> out;
  if (!grant) return out;
  for (const auto& [name, value] : profile.attributes) {
    if (grant->can_read_attribute(name)) out[name] = value;
  }
  return out;
}

bool knows_follower(const SiteNode& site, const SocialID& follower, const SocialID& owner) {
  if (const ActorRecord* rec = site.find_actor(owner)) {
    if (rec->contacts.followers.count(follower)) return true;
  }
  if (const ActorRecord* rec = site.find_actor(follower)) {
    if (rec->contacts.following.count(owner)) return true;
  }
  return false;
}

namespace {

Decision authorize_object(const SiteNode& site, const Principal& who, const ObjectID& oid,
                          AccessAction action) {
  const ObjectRecord* obj = site.find_object(oid);
  if (!obj) return Decision::denied(DenyReason::not_in_audience);

  const bool is_author = who.actor && *who.actor == obj->author;
  const bool is_owner = who.actor && *who.actor == obj->owner;

  Decision read = Decision::denied(DenyReason::not_in_audience);
  if (is_author || is_owner) {
    read = Decision::allowed();
  } else {
    switch (obj->audience.policy) {
      case AudiencePolicy::pub:
        read = Decision::allowed();
        break;
      case AudiencePolicy::followers_only:
        if (who.actor && knows_follower(site, *who.actor, obj->owner)) {
          read = Decision::allowed();
        } else {
          read = Decision::denied(DenyReason::not_follower);
        }
        break;
      case AudiencePolicy::listed:
        if (who.actor && obj->audience.listed.count(*who.actor)) {
          read = Decision::allowed();
        } else {
          read = Decision::denied(DenyReason::not_in_audience);
        }
        break;
    }
  }
  if (action == AccessAction::read) return read;

  // Writes need authorship, ownership, or an explicit editor grant on top of
  // audience membership.
  if (is_author || is_owner) return Decision::allowed();
  if (!read.allow) return read;
  if (who.actor && obj->editors.count(*who.actor)) return Decision::allowed();
  return Decision::denied(DenyReason::no_scope);
}

Decision authorize_profile(const SiteNode& site, const Principal& who,
                           const ProfileScope& scope, AccessAction action) {
  // Self-access at the home site is always allowed.
  if (who.actor && *who.actor == scope.subject && site.domain == scope.subject.authority) {
    return Decision::allowed();
  }
  const ScopeGrant* grant = find_grant(site, scope.subject, who.site);
  if (!grant) return Decision::denied(DenyReason::no_scope);
  if (action == AccessAction::read) {
    if (scope.attribute == "*") {
      return grant->read_level == ScopeGrant::ReadLevel::none
                 ? Decision::denied(DenyReason::no_scope)
                 : Decision::allowed();
    }
    if (scope.attribute == "contacts") {
      return grant->contacts_readable ? Decision::allowed()
                                      : Decision::denied(DenyReason::no_scope);
    }
    if (scope.attribute == "collections") {
      return grant->collections_readable ? Decision::allowed()
                                         : Decision::denied(DenyReason::no_scope);
    }
    return grant->can_read_attribute(scope.attribute)
               ? Decision::allowed()
               : Decision::denied(DenyReason::no_scope);
  }
  return grant->can_write_attribute(scope.attribute)
             ? Decision::allowed()
             : Decision::denied(DenyReason::no_scope);
}

}  // namespace

Decision authorize(const SiteNode& serving_site, const Principal& who, const Resource& what,
                   AccessAction action) {
  if (std::holds_alternative<ObjectID>(what)) {
    return authorize_object(serving_site, who, std::get<ObjectID>(what), action);
  }
  return authorize_profile(serving_site, who, std::get<ProfileScope>(what), action);
}

}  // namespace privacy

}  // namespace fedsim
