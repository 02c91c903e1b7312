#include <algorithm>
#include <vector>

#include "fedsim/activities.hpp"
#include "fedsim/identity.hpp"
#include "fedsim/objects.hpp"
#include "fedsim/privacy.hpp"
#include "fedsim/profiles.hpp"
#include "fedsim/simulation.hpp"

namespace fedsim {

namespace {

HandlerResult error_result(Errc code, const std::string& detail = {}) {
  HandlerResult out;
  out.response["status"] = to_string(code);
  if (!detail.empty()) out.response["detail"] = detail;
  return out;
}

HandlerResult deny_result(const Decision& d) {
  HandlerResult out;
  // Deny responses carry the reason code verbatim in the status field.
  out.response["status"] = to_string(d.reason);
  return out;
}

std::vector<std::string> split_path(const std::string& endpoint) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : endpoint) {
    if (c == '/') {
      if (!current.empty()) parts.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) parts.push_back(current);
  return parts;
}

ActorRecord* native_actor(SiteNode& site, const std::string& local) {
  SocialID id{IdScheme::acct, site.domain, local};
  ActorRecord* rec = site.find_actor(id);
  if (!rec || rec->kind != ActorKind::native) return nullptr;
  return rec;
}

HandlerResult handle_discovery(Simulation& sim, SiteNode& site, const Document& body) {
  auto subject = parse_social_id(body.value("subject", ""));
  if (!subject || subject.value().authority != site.domain) {
    return error_result(Errc::unknown_actor);
  }
  ActorRecord* rec = site.find_actor(subject.value());
  if (!rec || rec->kind != ActorKind::native) {
    return error_result(Errc::unknown_actor, subject.value().text());
  }
  auto discovery = identity::resolve(sim, site.domain, subject.value());
  HandlerResult out;
  out.response = discovery.value().to_document();
  out.response["status"] = "ok";
  return out;
}

HandlerResult handle_login(Simulation& sim, SiteNode& site, const Document& body) {
  auto parsed = identity::AuthAssertion::from_document(body);
  if (!parsed) return error_result(Errc::bad_token, "malformed assertion");
  const identity::AuthAssertion& assertion = parsed.value();
  if (assertion.issued_by != assertion.subject.authority) {
    return error_result(Errc::bad_token, "issuer is not the subject's home");
  }
  AuthTag expected = keyed_digest(
      sim.pair_key(assertion.issued_by, site.domain),
      identity::assertion_signing_input(assertion.subject, assertion.issued_by,
                                        assertion.nonce));
  if (expected != assertion.token) return error_result(Errc::bad_token);
  if (site.seen_nonces.count(assertion.nonce)) return error_result(Errc::replayed_nonce);
  site.seen_nonces.insert(assertion.nonce);

  ActorRecord& rec = activities::ensure_actor_known(sim, site, assertion.subject);
  if (rec.kind == ActorKind::alien) rec.kind = ActorKind::foreign;

  HandlerResult out;
  out.response["status"] = "ok";
  out.response["kind"] = to_string(rec.kind);
  return out;
}

HandlerResult handle_profile_read(Simulation& sim, SiteNode& site, const std::string& local,
                                  const Document& body) {
  ActorRecord* rec = native_actor(site, local);
  if (!rec) return error_result(Errc::unknown_actor, local);
  std::string requesting_site = body.value("requesting_site", "");

  Principal who = Principal::for_site(requesting_site);
  ProfileScope scope{rec->id, "*"};
  const ScopeGrant* grant = privacy::find_grant(site, rec->id, requesting_site);
  Decision d = privacy::authorize(site, who, scope, AccessAction::read);
  sim.trace_decision(site.domain, who, scope, AccessAction::read, d);

  auto filtered = privacy::filter_attributes(rec->profile, grant);
  HandlerResult out;
  out.response["status"] = "ok";
  out.response["owner"] = rec->id.text();
  out.response["revision"] = rec->profile.revision;
  out.response["attributes"] = Document::object();
  for (const auto& [name, value] : filtered) out.response["attributes"][name] = value;
  out.payload_bearing = !filtered.empty();
  out.audit_principal = who.text();
  out.audit_resource = resource_text(scope);
  return out;
}

HandlerResult handle_profile_subscribe(Simulation& sim, SiteNode& site,
                                       const std::string& local, const Document& body) {
  ActorRecord* rec = native_actor(site, local);
  if (!rec) return error_result(Errc::unknown_actor, local);
  Subscription sub;
  sub.topic = Subscription::Topic::profile;
  sub.subject = rec->id.text();
  sub.subscriber_site = body.value("subscriber_site", "");
  sub.created = sim.now();
  site.upsert_subscription(std::move(sub));
  HandlerResult out;
  out.response["status"] = "ok";
  out.response["created"] = sim.now();
  return out;
}

HandlerResult handle_profile_update(Simulation& sim, SiteNode& site, const std::string& local,
                                    const Document& body) {
  ActorRecord* rec = native_actor(site, local);
  if (!rec) return error_result(Errc::unknown_actor, local);
  std::string attribute = body.value("attribute", "");
  std::string via_site = body.value("via_site", "");

  Principal who = Principal::for_site(via_site);
  ProfileScope scope{rec->id, attribute};
  Decision d = privacy::authorize(site, who, scope, AccessAction::write);
  sim.trace_decision(site.domain, who, scope, AccessAction::write, d);
  if (!d.allow) return error_result(Errc::forbidden_scope, attribute);

  auto revision = profiles::set_attribute_at_home(sim, site, rec->id, attribute,
                                                  body.value("value", ""));
  if (!revision) return error_result(revision.error().code, revision.error().detail);
  HandlerResult out;
  out.response["status"] = "ok";
  out.response["revision"] = revision.value();
  return out;
}

HandlerResult handle_contacts(Simulation& sim, SiteNode& site, const std::string& local,
                              const Document& body) {
  ActorRecord* rec = native_actor(site, local);
  if (!rec) return error_result(Errc::unknown_actor, local);
  std::string requesting_site = body.value("requesting_site", "");

  Principal who = Principal::for_site(requesting_site);
  ProfileScope scope{rec->id, "contacts"};
  Decision d = privacy::authorize(site, who, scope, AccessAction::read);
  sim.trace_decision(site.domain, who, scope, AccessAction::read, d);
  if (!d.allow) return error_result(Errc::forbidden_scope, "contacts");

  HandlerResult out;
  out.response["status"] = "ok";
  Document following = Document::array();
  for (const auto& id : rec->contacts.following) following.push_back(id.text());
  Document followers = Document::array();
  for (const auto& id : rec->contacts.followers) followers.push_back(id.text());
  out.response["following"] = std::move(following);
  out.response["followers"] = std::move(followers);
  out.payload_bearing = true;
  out.audit_principal = who.text();
  out.audit_resource = resource_text(scope);
  return out;
}

HandlerResult handle_collection(Simulation& sim, SiteNode& site, const std::string& local,
                                const std::string& name, const Document& body) {
  ActorRecord* rec = native_actor(site, local);
  if (!rec) return error_result(Errc::unknown_actor, local);
  if (!valid_collection_name(name)) return error_result(Errc::unknown_collection, name);
  std::string requesting_site = body.value("requesting_site", "");

  Principal gate = Principal::for_site(requesting_site);
  ProfileScope scope{rec->id, "collections"};
  Decision d = privacy::authorize(site, gate, scope, AccessAction::read);
  sim.trace_decision(site.domain, gate, scope, AccessAction::read, d);
  if (!d.allow) return error_result(Errc::forbidden_scope, "collections");

  Principal who = gate;
  if (body.contains("on_behalf_of")) {
    if (auto actor = parse_social_id(body["on_behalf_of"].get<std::string>())) {
      who = Principal::for_actor(actor.take(), requesting_site);
    }
  }

  HandlerResult out;
  out.response["status"] = "ok";
  Document objects = Document::array();
  auto it = rec->object_collections.find(name);
  if (it != rec->object_collections.end()) {
    for (auto rit = it->second.rbegin(); rit != it->second.rend(); ++rit) {
      // Audience filtering applies per member; unknown members pass through as
      // plain references.
      const ObjectRecord* obj = site.find_object(*rit);
      if (obj && !privacy::authorize(site, who, *rit, AccessAction::read).allow) continue;
      objects.push_back(rit->text());
    }
  }
  out.response["objects"] = std::move(objects);
  return out;
}

HandlerResult handle_object_fetch(Simulation& sim, SiteNode& site, const std::string& local,
                                  const Document& body) {
  ObjectID oid{site.domain, local};
  ObjectRecord* obj = site.find_object(oid);
  if (!obj || (obj->kind == ActorKind::native && obj->deleted)) {
    return error_result(Errc::unknown_object, oid.text());
  }
  auto requester = parse_social_id(body.value("requester", ""));
  if (!requester) return error_result(Errc::forbidden, "requester");
  Principal who = Principal::for_actor(requester.take(), body.value("via_site", ""));
  Decision d = privacy::authorize(site, who, oid, AccessAction::read);
  sim.trace_decision(site.domain, who, oid, AccessAction::read, d);
  if (!d.allow) return deny_result(d);

  HandlerResult out;
  out.response["status"] = "ok";
  out.response["payload_hex"] = to_hex(obj->payload.value_or(""));
  out.response["revision"] = obj->revision;
  out.response["content_type"] = to_string(obj->content_type);
  out.payload_bearing = true;
  out.audit_principal = who.text();
  out.audit_resource = oid.text();
  return out;
}

HandlerResult handle_object_subscribe(Simulation& sim, SiteNode& site,
                                      const std::string& local, const Document& body) {
  ObjectID oid{site.domain, local};
  ObjectRecord* obj = site.find_object(oid);
  if (!obj || obj->kind != ActorKind::native || obj->deleted) {
    return error_result(Errc::unknown_object, oid.text());
  }
  std::string subscriber_site = body.value("subscriber_site", "");
  std::optional<SocialID> requester;
  if (body.contains("requester")) {
    auto parsed = parse_social_id(body["requester"].get<std::string>());
    if (parsed) requester = parsed.take();
  }

  Principal who = requester ? Principal::for_actor(*requester, subscriber_site)
                            : Principal::for_site(subscriber_site);
  Decision d = privacy::authorize(site, who, oid, AccessAction::read);
  sim.trace_decision(site.domain, who, oid, AccessAction::read, d);
  if (!d.allow) return deny_result(d);

  bool subscribe_only = body.value("subscribe_only", false);
  std::string mode = body.value("mode", "cache");

  if (subscribe_only || mode == "cache") {
    Subscription sub;
    sub.topic = Subscription::Topic::object;
    sub.subject = oid.text();
    sub.subscriber_site = subscriber_site;
    sub.created = sim.now();
    sub.on_behalf_of = requester;
    site.upsert_subscription(std::move(sub));
  }

  HandlerResult out;
  out.response["status"] = "ok";
  out.response["created"] = sim.now();
  out.response["revision"] = obj->revision;
  out.response["content_type"] = to_string(obj->content_type);
  out.response["author"] = obj->author.text();
  out.response["owner"] = obj->owner.text();
  out.response["audience"] = obj->audience.to_document();
  if (!subscribe_only && mode == "cache") {
    out.response["payload_hex"] = to_hex(obj->payload.value_or(""));
    out.payload_bearing = true;
    out.audit_principal = who.text();
    out.audit_resource = oid.text();
  }
  return out;
}

HandlerResult handle_object_edit(Simulation& sim, SiteNode& site, const std::string& local,
                                 const Document& body) {
  ObjectID oid{site.domain, local};
  ObjectRecord* obj = site.find_object(oid);
  if (!obj || obj->kind != ActorKind::native || obj->deleted) {
    return error_result(Errc::unknown_object, oid.text());
  }
  auto editor = parse_social_id(body.value("editor", ""));
  if (!editor) return error_result(Errc::forbidden, "editor");
  Principal who = Principal::for_actor(editor.take(), body.value("via_site", ""));
  Decision d = privacy::authorize(site, who, oid, AccessAction::write);
  sim.trace_decision(site.domain, who, oid, AccessAction::write, d);
  if (!d.allow) return deny_result(d);

  // The content site serializes edits; a stale base loses and retries.
  std::uint64_t base = body.value("base_revision", std::uint64_t{0});
  if (base != obj->revision) return error_result(Errc::conflict_retry, "stale base revision");

  auto patch = from_hex(body.value("patch_hex", ""));
  if (!patch) return error_result(Errc::malformed_document, "patch");
  if (patch.value().size() > sim.payload_cap) return error_result(Errc::payload_too_large);
  obj->payload = patch.take();
  obj->revision += 1;
  activities::emit_object_update(sim, site, oid, who.actor.value());

  HandlerResult out;
  out.response["status"] = "ok";
  out.response["revision"] = obj->revision;
  return out;
}

HandlerResult handle_feed(Simulation& sim, SiteNode& site, const std::string& local,
                          const Document& body) {
  ActorRecord* rec = native_actor(site, local);
  if (!rec) return error_result(Errc::unknown_subject, local);
  Principal who = Principal::for_site(body.value("requesting_site", ""));
  if (body.contains("requester")) {
    if (auto actor = parse_social_id(body["requester"].get<std::string>())) {
      who = Principal::for_actor(actor.take(), body.value("requesting_site", ""));
    }
  }
  auto feed = activities::publish_feed(sim, site.domain, rec->id, who);
  if (!feed) return error_result(feed.error().code, feed.error().detail);
  HandlerResult out;
  out.response = feed.take();
  out.response["status"] = "ok";
  return out;
}

HandlerResult handle_feed_subscribe(Simulation& sim, SiteNode& site, const std::string& local,
                                    const Document& body) {
  ActorRecord* rec = native_actor(site, local);
  if (!rec) return error_result(Errc::unknown_subject, local);
  std::string subscriber_site = body.value("subscriber_site", "");

  // Feeds are public unless the owner marked them private, in which case the
  // subscriber site needs a collections grant.
  auto policy = rec->profile.attributes.find("x-feed-policy");
  if (policy != rec->profile.attributes.end() && policy->second == "private") {
    Principal who = Principal::for_site(subscriber_site);
    ProfileScope scope{rec->id, "collections"};
    Decision d = privacy::authorize(site, who, scope, AccessAction::read);
    sim.trace_decision(site.domain, who, scope, AccessAction::read, d);
    if (!d.allow) return error_result(Errc::forbidden, "private feed");
  }

  Subscription sub;
  sub.topic = Subscription::Topic::actor_activities;
  sub.subject = rec->id.text();
  sub.subscriber_site = subscriber_site;
  sub.created = sim.now();
  if (body.contains("on_behalf_of")) {
    if (auto actor = parse_social_id(body["on_behalf_of"].get<std::string>())) {
      sub.on_behalf_of = actor.take();
    }
  }
  site.upsert_subscription(std::move(sub));
  HandlerResult out;
  out.response["status"] = "ok";
  out.response["created"] = sim.now();
  return out;
}

}  // namespace

HandlerResult dispatch_endpoint(Simulation& sim, SiteNode& serving, const Envelope& env,
                                const Document& body) {
  const std::string& endpoint = env.endpoint;
  if (endpoint == "/.well-known/social") return handle_discovery(sim, serving, body);
  if (endpoint == "/login") return handle_login(sim, serving, body);

  auto parts = split_path(endpoint);
  if (parts.size() >= 2 && parts[0] == "profile") {
    if (parts.size() == 2) return handle_profile_read(sim, serving, parts[1], body);
    if (parts.size() == 3 && parts[2] == "subscribe") {
      return handle_profile_subscribe(sim, serving, parts[1], body);
    }
    if (parts.size() == 3 && parts[2] == "update") {
      return handle_profile_update(sim, serving, parts[1], body);
    }
  }
  if (parts.size() == 2 && parts[0] == "contacts") {
    return handle_contacts(sim, serving, parts[1], body);
  }
  if (parts.size() == 3 && parts[0] == "collection") {
    return handle_collection(sim, serving, parts[1], parts[2], body);
  }
  if (parts.size() >= 2 && parts[0] == "object") {
    if (parts.size() == 2) return handle_object_fetch(sim, serving, parts[1], body);
    if (parts.size() == 3 && parts[2] == "subscribe") {
      return handle_object_subscribe(sim, serving, parts[1], body);
    }
    if (parts.size() == 3 && parts[2] == "edit") {
      return handle_object_edit(sim, serving, parts[1], body);
    }
  }
  if (parts.size() >= 2 && parts[0] == "feed") {
    if (parts.size() == 2) return handle_feed(sim, serving, parts[1], body);
    if (parts.size() == 3 && parts[2] == "subscribe") {
      return handle_feed_subscribe(sim, serving, parts[1], body);
    }
  }
  return error_result(Errc::malformed_document, "unknown endpoint " + endpoint);
}

}  // namespace fedsim
