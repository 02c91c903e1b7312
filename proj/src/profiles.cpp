#include "fedsim/profiles.hpp"

#include <algorithm>

#include "fedsim/activities.hpp"
#include "fedsim/privacy.hpp"

namespace fedsim::profiles {

Result<std::uint64_t> set_attribute_at_home(Simulation& sim, SiteNode& home,
                                            const SocialID& id, const std::string& name,
                                            const std::string& value) {
  ActorRecord* rec = home.find_actor(id);
  if (!rec || rec->kind != ActorKind::native) return Error(Errc::unknown_actor, id.text());
  if (!recognized_attribute(name)) return Error(Errc::unknown_attribute, name);
  rec->profile.attributes[name] = value;
  rec->profile.revision += 1;
  activities::emit_profile_update(sim, home, id, name);
  return rec->profile.revision;
}

Result<ProfileDoc> get_profile(Simulation& sim, const std::string& requesting_site,
                               const SocialID& id) {
  if (id.authority == requesting_site) {
    SiteNode& site = sim.site(requesting_site);
    ActorRecord* rec = site.find_actor(id);
    if (!rec) return Error(Errc::unknown_actor, id.text());
    return rec->profile;
  }

  Document body = Document::object();
  body["requesting_site"] = requesting_site;
  auto resp = sim.sync_request(requesting_site, id.authority, "/profile/" + id.local, body);
  if (!resp) return resp.error();
  const Document& doc = resp.value();
  if (doc.value("status", "") != "ok") return status_error(doc);

  ProfileDoc profile;
  profile.owner = id;
  profile.revision = doc.value("revision", std::uint64_t{0});
  for (const auto& [name, value] : doc["attributes"].items()) {
    profile.attributes[name] = value.get<std::string>();
  }

  ActorRecord& stub = sim.site(requesting_site).ensure_alien_stub(id);
  if (profile.revision >= stub.profile.revision) {
    stub.profile.attributes = profile.attributes;
    stub.profile.revision = profile.revision;
  }
  return profile;
}

Result<Subscription> subscribe_profile(Simulation& sim, const std::string& remote_site,
                                       const SocialID& id) {
  if (id.authority == remote_site) {
    return Error(Errc::unknown_subject, "subject is native here");
  }
  Document body = Document::object();
  body["subscriber_site"] = remote_site;
  auto resp = sim.sync_request(remote_site, id.authority,
                               "/profile/" + id.local + "/subscribe", body);
  if (!resp) return resp.error();
  if (resp.value().value("status", "") != "ok") return status_error(resp.value());
  sim.site(remote_site).ensure_alien_stub(id);
  Subscription sub;
  sub.topic = Subscription::Topic::profile;
  sub.subject = id.text();
  sub.subscriber_site = remote_site;
  sub.created = resp.value().value("created", std::uint64_t{0});
  return sub;
}

Result<std::uint64_t> update_profile_attribute(Simulation& sim, const Session& session,
                                               const SocialID& id, const std::string& name,
                                               const std::string& value) {
  if (session.site == id.authority) {
    if (session.actor != id) return Error(Errc::forbidden_scope, "not the profile owner");
    return set_attribute_at_home(sim, sim.site(session.site), id, name, value);
  }

  // Remote-initiated write: travels from the client site to the identity site.
  Document body = Document::object();
  body["attribute"] = name;
  body["value"] = value;
  body["via_site"] = session.site;
  body["actor"] = session.actor.text();
  auto resp = sim.sync_request(session.site, id.authority, "/profile/" + id.local + "/update",
                               body);
  if (!resp) return resp.error();
  if (resp.value().value("status", "") != "ok") return status_error(resp.value());
  return resp.value().value("revision", std::uint64_t{0});
}

Result<ContactCollection> get_contacts(Simulation& sim, const std::string& requesting_site,
                                       const SocialID& id) {
  if (id.authority == requesting_site) {
    SiteNode& site = sim.site(requesting_site);
    ActorRecord* rec = site.find_actor(id);
    if (!rec) return Error(Errc::unknown_actor, id.text());
    return rec->contacts;
  }

  Document body = Document::object();
  body["requesting_site"] = requesting_site;
  auto resp = sim.sync_request(requesting_site, id.authority, "/contacts/" + id.local, body);
  if (!resp) return resp.error();
  const Document& doc = resp.value();
  if (doc.value("status", "") != "ok") return status_error(doc);

  ContactCollection contacts;
  for (const auto& entry : doc["following"]) {
    auto parsed = parse_social_id(entry.get<std::string>());
    if (parsed) contacts.following.insert(parsed.value());
  }
  for (const auto& entry : doc["followers"]) {
    auto parsed = parse_social_id(entry.get<std::string>());
    if (parsed) contacts.followers.insert(parsed.value());
  }
  return contacts;
}

Result<std::vector<ObjectID>> get_collection(Simulation& sim,
                                             const std::string& requesting_site,
                                             const SocialID& id, const std::string& name,
                                             const std::optional<SocialID>& on_behalf) {
  if (!valid_collection_name(name)) return Error(Errc::unknown_collection, name);

  if (id.authority == requesting_site) {
    SiteNode& site = sim.site(requesting_site);
    ActorRecord* rec = site.find_actor(id);
    if (!rec) return Error(Errc::unknown_actor, id.text());
    Principal who = on_behalf ? Principal::for_actor(*on_behalf, requesting_site)
                              : Principal::for_site(requesting_site);
    std::vector<ObjectID> out;
    auto it = rec->object_collections.find(name);
    if (it != rec->object_collections.end()) {
      for (auto rit = it->second.rbegin(); rit != it->second.rend(); ++rit) {
        const ObjectRecord* obj = site.find_object(*rit);
        if (obj && !privacy::authorize(site, who, *rit, AccessAction::read).allow) continue;
        out.push_back(*rit);
      }
    }
    return out;
  }

  Document body = Document::object();
  body["requesting_site"] = requesting_site;
  if (on_behalf) body["on_behalf_of"] = on_behalf->text();
  auto resp = sim.sync_request(requesting_site, id.authority,
                               "/collection/" + id.local + "/" + name, body);
  if (!resp) return resp.error();
  const Document& doc = resp.value();
  if (doc.value("status", "") != "ok") return status_error(doc);

  std::vector<ObjectID> out;
  for (const auto& entry : doc["objects"]) {
    auto oid = parse_object_id(entry.get<std::string>());
    if (oid) out.push_back(oid.value());
  }
  return out;
}

Result<Activity> propagate_foreign_contact(Simulation& sim, const Session& session,
                                           const SocialID& followed) {
  if (session.kind != ActorKind::foreign) {
    return Error(Errc::forbidden, "needs a foreign session");
  }
  if (!sim.has_site(session.actor.authority)) {
    return Error(Errc::unreachable, session.actor.authority);
  }
  return activities::perform(sim, session, Verb::follow, followed);
}

}  // namespace fedsim::profiles
