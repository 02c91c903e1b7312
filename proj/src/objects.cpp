#include "fedsim/objects.hpp"

#include "fedsim/activities.hpp"
#include "fedsim/privacy.hpp"

namespace fedsim::objects {

namespace {

ObjectRecord record_from_response(const ObjectID& oid, AlienMode mode, const Document& doc) {
  ObjectRecord rec;
  rec.id = oid;
  rec.kind = ActorKind::alien;
  rec.mode = mode;
  rec.revision = doc.value("revision", std::uint64_t{0});
  if (auto ct = parse_content_type(doc.value("content_type", "generic"))) {
    rec.content_type = *ct;
  }
  if (auto author = parse_social_id(doc.value("author", ""))) rec.author = author.take();
  if (auto owner = parse_social_id(doc.value("owner", ""))) rec.owner = owner.take();
  if (doc.contains("audience")) {
    if (auto audience = Audience::from_document(doc["audience"])) {
      rec.audience = audience.take();
    }
  }
  if (mode == AlienMode::cache && doc.contains("payload_hex")) {
    if (auto bytes = from_hex(doc["payload_hex"].get<std::string>())) {
      rec.payload = bytes.take();
      rec.cached_revision = rec.revision;
    }
  }
  return rec;
}

}  // namespace

Result<ObjectRecord> create_object(Simulation& sim, const Session& session,
                                   const CreateSpec& spec) {
  SiteNode& site = sim.site(session.site);
  ActorRecord* actor_rec = site.find_actor(session.actor);
  if (!actor_rec || actor_rec->kind == ActorKind::alien) {
    return Error(Errc::forbidden, "no session record at " + session.site);
  }
  if (spec.payload.size() > sim.payload_cap) {
    return Error(Errc::payload_too_large, std::to_string(spec.payload.size()));
  }
  SocialID owner = spec.owner.value_or(session.actor);
  if (owner != session.actor) {
    auto it = site.wall_permissions.find(owner);
    if (it == site.wall_permissions.end() || !it->second.count(session.actor)) {
      return Error(Errc::forbidden, "no wall permission for " + owner.text());
    }
  }
  std::string key = spec.local_key ? *spec.local_key : site.issue_object_key();
  ObjectID oid{site.domain, key};
  if (site.find_object(oid)) return Error(Errc::name_taken, oid.text());

  ObjectRecord rec;
  rec.id = oid;
  rec.kind = ActorKind::native;
  rec.content_type = spec.content_type;
  rec.payload = spec.payload;
  rec.revision = 1;
  rec.author = session.actor;
  rec.owner = owner;
  rec.audience = spec.audience;
  rec.mentioned = spec.mentions;
  rec.editors = spec.editors;
  rec.created_tick = sim.now();
  ObjectRecord& stored = site.objects.emplace(oid, std::move(rec)).first->second;

  if (spec.emit_activities) {
    Activity post;
    post.id = site.issue_activity_id();
    post.verb = Verb::post;
    post.actor = session.actor;
    post.object = oid;
    post.payload["owner"] = owner.text();
    if (!spec.mentions.empty()) {
      Document mentions = Document::array();
      for (const auto& id : spec.mentions) mentions.push_back(id.text());
      post.payload["mentions"] = mentions;
    }
    post.published = sim.now();
    activities::record_and_fanout(sim, site, post);

    if (owner != session.actor) {
      Activity own;
      own.id = site.issue_activity_id();
      own.verb = Verb::own;
      own.actor = session.actor;
      own.object = oid;
      own.target = owner;
      own.payload["owner"] = owner.text();
      own.published = sim.now();
      activities::record_and_fanout(sim, site, own);
    }

    if (!spec.mentions.empty()) {
      Activity mention;
      mention.id = site.issue_activity_id();
      mention.verb = Verb::mention;
      mention.actor = session.actor;
      mention.object = oid;
      Document mentions = Document::array();
      for (const auto& id : spec.mentions) mentions.push_back(id.text());
      mention.payload["mentions"] = mentions;
      mention.published = sim.now();
      activities::record_and_fanout(sim, site, mention);
    }
  }
  return stored;
}

Status allow_wall_post(Simulation& sim, const Session& owner_session, const SocialID& poster) {
  SiteNode& site = sim.site(owner_session.site);
  if (!site.find_actor(owner_session.actor)) return Error(Errc::forbidden, "no session record");
  site.wall_permissions[owner_session.actor].insert(poster);
  return ok_status();
}

Status add_editor(Simulation& sim, const Session& owner_session, const ObjectID& oid,
                  const SocialID& editor) {
  SiteNode& site = sim.site(owner_session.site);
  ObjectRecord* obj = site.find_object(oid);
  if (!obj || obj->kind != ActorKind::native) return Error(Errc::unknown_object, oid.text());
  if (obj->owner != owner_session.actor && obj->author != owner_session.actor) {
    return Error(Errc::forbidden, "only the owner grants write access");
  }
  obj->editors.insert(editor);
  return ok_status();
}

Result<ObjectRecord> import_alien(Simulation& sim, const std::string& remote_site,
                                  const ObjectID& oid, AlienMode mode,
                                  const SocialID& requester) {
  if (oid.authority == remote_site) {
    SiteNode& site = sim.site(remote_site);
    ObjectRecord* obj = site.find_object(oid);
    if (!obj) return Error(Errc::unknown_object, oid.text());
    return *obj;
  }

  Document body = Document::object();
  body["subscriber_site"] = remote_site;
  body["mode"] = to_string(mode);
  body["requester"] = requester.text();
  auto resp = sim.sync_request(remote_site, oid.authority, "/object/" + oid.local + "/subscribe",
                               body);
  if (!resp) return resp.error();
  const Document& doc = resp.value();
  if (doc.value("status", "") != "ok") return status_error(doc);

  SiteNode& site = sim.site(remote_site);
  ObjectRecord rec = record_from_response(oid, mode, doc);
  rec.created_tick = sim.now();
  auto [it, inserted] = site.objects.emplace(oid, rec);
  if (!inserted) {
    // Refresh, but never step a cache backwards.
    if (rec.revision >= it->second.revision) {
      std::uint64_t created = it->second.created_tick;
      it->second = rec;
      it->second.created_tick = created;
    }
  }
  return it->second;
}

Result<std::string> fetch_representation(Simulation& sim, const ObjectID& oid,
                                         const SocialID& requester,
                                         const std::string& via_site) {
  SiteNode& via = sim.site(via_site);
  ObjectRecord* rec = via.find_object(oid);

  if (rec && rec->kind == ActorKind::native) {
    if (rec->deleted) return Error(Errc::unknown_object, "deleted");
    Principal who = Principal::for_actor(requester, via_site);
    Decision d = privacy::authorize(via, who, oid, AccessAction::read);
    sim.trace_decision(via_site, who, oid, AccessAction::read, d);
    if (!d.allow) return Error(Errc::forbidden, to_string(d.reason));
    return rec->payload.value_or("");
  }

  if (rec) {
    // Privacy restrictions apply at the serving cache too.
    Principal who = Principal::for_actor(requester, via_site);
    Decision d = privacy::authorize(via, who, oid, AccessAction::read);
    sim.trace_decision(via_site, who, oid, AccessAction::read, d);
    if (!d.allow) return Error(Errc::forbidden, to_string(d.reason));
    if (rec->mode == AlienMode::cache && rec->payload) return *rec->payload;

    Document body = Document::object();
    body["requester"] = requester.text();
    body["via_site"] = via_site;
    auto resp = sim.sync_request(via_site, oid.authority, "/object/" + oid.local, body);
    if (!resp || resp.value().value("status", "") == "unknown_object") {
      return Error(Errc::stale_unavailable, oid.text());
    }
    if (resp.value().value("status", "") != "ok") return status_error(resp.value());
    auto bytes = from_hex(resp.value().value("payload_hex", ""));
    if (!bytes) return bytes.error();
    return bytes.take();
  }

  if (oid.authority == via_site) return Error(Errc::unknown_object, oid.text());

  // No local copy; read through to the content site.
  Document body = Document::object();
  body["requester"] = requester.text();
  body["via_site"] = via_site;
  auto resp = sim.sync_request(via_site, oid.authority, "/object/" + oid.local, body);
  if (!resp) return resp.error();
  if (resp.value().value("status", "") != "ok") return status_error(resp.value());
  auto bytes = from_hex(resp.value().value("payload_hex", ""));
  if (!bytes) return bytes.error();
  return bytes.take();
}

Result<std::uint64_t> update_object(Simulation& sim, const Session& session,
                                    const ObjectID& oid, const std::string& new_payload) {
  if (session.site != oid.authority) {
    return Error(Errc::forbidden, "updates happen at the content site");
  }
  SiteNode& site = sim.site(session.site);
  ObjectRecord* obj = site.find_object(oid);
  if (!obj || obj->deleted) return Error(Errc::unknown_object, oid.text());
  if (obj->author != session.actor && obj->owner != session.actor) {
    return Error(Errc::forbidden, "author or owner only");
  }
  if (new_payload.size() > sim.payload_cap) return Error(Errc::payload_too_large);
  obj->payload = new_payload;
  obj->revision += 1;
  activities::emit_object_update(sim, site, oid, session.actor);
  return obj->revision;
}

Status delete_object(Simulation& sim, const Session& session, const ObjectID& oid) {
  if (session.site != oid.authority) {
    return Error(Errc::forbidden, "deletes happen at the content site");
  }
  SiteNode& site = sim.site(session.site);
  ObjectRecord* obj = site.find_object(oid);
  if (!obj) return Error(Errc::unknown_object, oid.text());
  if (obj->owner != session.actor) return Error(Errc::forbidden, "owner only");
  if (obj->deleted) return ok_status();  // idempotent
  obj->deleted = true;
  obj->payload.reset();
  activities::emit_object_delete(sim, site, oid, session.actor);
  return ok_status();
}

Result<std::uint64_t> edit_foreign_object(Simulation& sim, const Session& remote_session,
                                          const ObjectID& oid, const std::string& patch) {
  if (oid.authority == remote_session.site) {
    return Error(Errc::forbidden, "native objects are edited via update_object");
  }
  SiteNode& site = sim.site(remote_session.site);
  ObjectRecord* rec = site.find_object(oid);
  if (!rec || rec->kind == ActorKind::native) {
    return Error(Errc::forbidden, "no foreign copy here");
  }

  Principal who = Principal::for_actor(remote_session.actor, remote_session.site);
  Decision d = privacy::authorize(site, who, oid, AccessAction::write);
  sim.trace_decision(remote_session.site, who, oid, AccessAction::write, d);
  if (!d.allow) return Error(Errc::forbidden, to_string(d.reason));

  std::uint64_t base = rec->mode == AlienMode::cache ? rec->cached_revision : rec->revision;
  Document body = Document::object();
  body["editor"] = remote_session.actor.text();
  body["via_site"] = remote_session.site;
  body["base_revision"] = base;
  body["patch_hex"] = to_hex(patch);
  auto resp = sim.sync_request(remote_session.site, oid.authority,
                               "/object/" + oid.local + "/edit", body);
  if (!resp) return resp.error();
  if (resp.value().value("status", "") != "ok") return status_error(resp.value());

  std::uint64_t revision = resp.value().value("revision", std::uint64_t{0});
  if (rec->mode == AlienMode::cache) {
    rec->payload = patch;
    rec->cached_revision = revision;
  }
  rec->revision = revision;
  return revision;
}

}  // namespace fedsim::objects
