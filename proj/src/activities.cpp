#include "fedsim/activities.hpp"

#include <algorithm>

#include "fedsim/identity.hpp"
#include "fedsim/objects.hpp"
#include "fedsim/privacy.hpp"

namespace fedsim {

Document ActivityFeed::to_document() const {
  Document doc = Document::object();
  doc["subject"] = ref_text(subject);
  doc["as_of"] = as_of;
  Document list = Document::array();
  for (const auto& act : entries) list.push_back(act.to_document());
  doc["entries"] = std::move(list);
  return doc;
}

namespace activities {

namespace {

void sort_newest_first(std::vector<Activity>& entries) {
  std::sort(entries.begin(), entries.end(), [](const Activity& a, const Activity& b) {
    if (a.published != b.published) return a.published > b.published;
    return a.id < b.id;
  });
}

// A feed entry is visible when the requester may read the object it touches,
// judged from what this site knows.
bool entry_visible(const SiteNode& site, const Activity& act, const Principal& requester) {
  const ObjectID* oid = std::get_if<ObjectID>(&act.object);
  if (!oid) oid = std::get_if<ObjectID>(&act.target);
  if (!oid) return true;
  if (!site.find_object(*oid)) return true;  // reference only, nothing served
  return privacy::authorize(site, requester, *oid, AccessAction::read).allow;
}

void notify_actor(SiteNode& site, const SocialID& id, const std::string& activity_id) {
  if (ActorRecord* rec = site.find_actor(id)) {
    rec->notifications.push_back(activity_id);
  }
}

void append_collection(ActorRecord& rec, const std::string& name, const ObjectID& oid) {
  auto& list = rec.object_collections[name];
  if (std::find(list.begin(), list.end(), oid) == list.end()) list.push_back(oid);
}

// Distributes notification duties for an activity serialized at this site:
// local recipients get inbox entries, remote ones are accumulated on the
// activity's notify list and their home sites joined into the relay set.
void notify_recipients(Simulation& sim, SiteNode& site, Activity& act,
                       const std::set<SocialID>& recipients,
                       std::set<std::string>& targets) {
  for (const auto& who : recipients) {
    if (who == act.actor) continue;
    if (who.authority == site.domain) {
      ensure_actor_known(sim, site, who);
      notify_actor(site, who, act.id);
    } else {
      Document& notify = act.payload["notify"];
      if (!notify.is_array()) notify = Document::array();
      notify.push_back(who.text());
      targets.insert(who.authority);
    }
  }
}

}  // namespace

ActorRecord& ensure_actor_known(Simulation& sim, SiteNode& site, const SocialID& id) {
  if (ActorRecord* rec = site.find_actor(id)) return *rec;
  if (id.authority != site.domain) {
    // Discover the actor at its identity site; fall back to a bare stub when
    // the home is unreachable.
    identity::resolve(sim, site.domain, id);
    if (ActorRecord* rec = site.find_actor(id)) return *rec;
  }
  return site.ensure_alien_stub(id);
}

ApplyOutcome apply_inbound(Simulation& sim, SiteNode& site, Activity act,
                           bool performed_here) {
  ApplyOutcome outcome;
  outcome.relayed = act;

  if (site.applied_activities.count(act.id)) {
    outcome.result = "duplicate";
    Document detail = Document::object();
    detail["activity"] = act.id;
    detail["result"] = "duplicate";
    sim.trace_event(site.domain, "apply", std::move(detail));
    return outcome;
  }
  site.applied_activities.insert(act.id);

  ActorRecord& actor_rec = ensure_actor_known(sim, site, act.actor);
  actor_rec.timeline.push_back(act.id);

  std::set<std::string>& targets = outcome.relay_targets;
  const bool system_verb = act.verb == Verb::profile_update ||
                           act.verb == Verb::object_update ||
                           act.verb == Verb::object_delete;
  if (!system_verb) {
    if (site.domain == act.actor.authority) {
      // Identity site fans its native actors' activities out to subscribers.
      for (const auto& sub : site.subscriptions) {
        if (sub.topic == Subscription::Topic::actor_activities &&
            sub.subject == act.actor.text()) {
          targets.insert(sub.subscriber_site);
        }
      }
    } else if (performed_here) {
      targets.insert(act.actor.authority);  // home sync
    }
  }

  std::string result = "applied";

  switch (act.verb) {
    case Verb::follow: {
      const SocialID& followed = std::get<SocialID>(act.object);
      site.find_actor(act.actor)->contacts.following.insert(followed);
      if (followed.authority == site.domain) {
        if (ActorRecord* frec = site.find_actor(followed)) {
          frec->contacts.followers.insert(act.actor);
          if (act.actor.authority != site.domain) {
            Subscription sub;
            sub.topic = Subscription::Topic::actor_activities;
            sub.subject = followed.text();
            sub.subscriber_site = act.actor.authority;
            sub.created = sim.now();
            sub.on_behalf_of = act.actor;
            site.upsert_subscription(std::move(sub));
          }
        }
      } else if (performed_here) {
        targets.insert(followed.authority);
      }
      break;
    }
    case Verb::unfollow: {
      const SocialID& followed = std::get<SocialID>(act.object);
      site.find_actor(act.actor)->contacts.following.erase(followed);
      if (followed.authority == site.domain) {
        if (ActorRecord* frec = site.find_actor(followed)) {
          frec->contacts.followers.erase(act.actor);
          if (act.actor.authority != site.domain) {
            bool remaining = std::any_of(
                frec->contacts.followers.begin(), frec->contacts.followers.end(),
                [&](const SocialID& f) { return f.authority == act.actor.authority; });
            if (!remaining) {
              site.drop_subscription(Subscription::Topic::actor_activities,
                                     followed.text(), act.actor.authority);
            }
          }
        }
      } else if (performed_here) {
        targets.insert(followed.authority);
      }
      break;
    }
    case Verb::post: {
      const ObjectID& oid = std::get<ObjectID>(act.object);
      ActorRecord& author = *site.find_actor(act.actor);
      append_collection(author, "authored", oid);
      if (act.payload.value("owner", "") == act.actor.text()) {
        append_collection(author, "owned", oid);
      }
      break;
    }
    case Verb::own: {
      const ObjectID& oid = std::get<ObjectID>(act.object);
      const SocialID& owner = std::get<SocialID>(act.target);
      if (ActorRecord* orec = site.find_actor(owner)) {
        append_collection(*orec, "owned", oid);
      }
      if (owner.authority == site.domain) {
        ensure_actor_known(sim, site, owner);
        notify_actor(site, owner, act.id);
      } else if (performed_here) {
        targets.insert(owner.authority);
      }
      break;
    }
    case Verb::reply: {
      const ObjectID& target_oid = std::get<ObjectID>(act.target);
      if (target_oid.authority == site.domain) {
        ObjectRecord* obj = site.find_object(target_oid);
        if (!obj || obj->deleted) {
          result = "skipped";
        } else {
          Principal who = Principal::for_actor(act.actor, act.actor.authority);
          Decision d = privacy::authorize(site, who, target_oid, AccessAction::read);
          sim.trace_decision(site.domain, who, target_oid, AccessAction::read, d);
          if (!d.allow) {
            result = "denied";
          } else {
            const ObjectID& comment = std::get<ObjectID>(act.object);
            if (std::find(obj->reply_collection.begin(), obj->reply_collection.end(),
                          comment) == obj->reply_collection.end()) {
              obj->reply_collection.push_back(comment);
            }
            std::set<SocialID> recipients = obj->mentioned;
            recipients.insert(obj->author);
            notify_recipients(sim, site, act, recipients, targets);
          }
        }
      } else if (performed_here) {
        targets.insert(target_oid.authority);
      }
      break;
    }
    case Verb::rate: {
      const ObjectID& target_oid = std::get<ObjectID>(act.target);
      if (target_oid.authority == site.domain) {
        ObjectRecord* obj = site.find_object(target_oid);
        if (!obj || obj->deleted || !act.payload.contains("value")) {
          result = "skipped";
        } else {
          Principal who = Principal::for_actor(act.actor, act.actor.authority);
          Decision d = privacy::authorize(site, who, target_oid, AccessAction::read);
          sim.trace_decision(site.domain, who, target_oid, AccessAction::read, d);
          if (!d.allow) {
            result = "denied";
          } else {
            obj->ratings[act.actor] = act.payload["value"].get<std::int64_t>();
            notify_recipients(sim, site, act, {obj->author}, targets);
          }
        }
      } else if (performed_here) {
        targets.insert(target_oid.authority);
      }
      break;
    }
    case Verb::mention: {
      if (act.payload.contains("mentions") && act.payload["mentions"].is_array()) {
        for (const auto& entry : act.payload["mentions"]) {
          auto mentioned = parse_social_id(entry.get<std::string>());
          if (!mentioned) continue;
          if (mentioned.value().authority == site.domain) {
            ensure_actor_known(sim, site, mentioned.value());
            notify_actor(site, mentioned.value(), act.id);
          } else if (performed_here) {
            targets.insert(mentioned.value().authority);
          }
        }
      }
      break;
    }
    case Verb::reshare: {
      const ObjectID& oid = std::get<ObjectID>(act.object);
      if (oid.authority == site.domain) {
        if (ObjectRecord* obj = site.find_object(oid)) {
          notify_recipients(sim, site, act, {obj->author}, targets);
        }
      } else if (performed_here) {
        targets.insert(oid.authority);
      }
      break;
    }
    case Verb::profile_update: {
      const SocialID& subject = std::get<SocialID>(act.object);
      if (subject.authority != site.domain) {
        ActorRecord& rec = ensure_actor_known(sim, site, subject);
        std::uint64_t revision = act.payload.value("revision", std::uint64_t{0});
        if (revision > rec.profile.revision) {
          rec.profile.revision = revision;
          if (act.payload.contains("attributes")) {
            rec.profile.attributes.clear();
            for (const auto& [name, value] : act.payload["attributes"].items()) {
              rec.profile.attributes[name] = value.get<std::string>();
            }
          }
        }
      }
      break;
    }
    case Verb::object_update: {
      const ObjectID& oid = std::get<ObjectID>(act.object);
      if (oid.authority != site.domain) {
        ObjectRecord* rec = site.find_object(oid);
        if (rec && rec->kind != ActorKind::native && rec->mode == AlienMode::cache) {
          std::uint64_t revision = act.payload.value("revision", std::uint64_t{0});
          if (revision > rec->cached_revision) {
            auto bytes = from_hex(act.payload.value("payload_hex", ""));
            if (bytes) {
              rec->cached_revision = revision;
              rec->revision = revision;
              rec->payload = bytes.take();
            }
          }
        }
      }
      break;
    }
    case Verb::object_delete: {
      const ObjectID& oid = std::get<ObjectID>(act.object);
      if (oid.authority != site.domain) {
        if (ObjectRecord* rec = site.find_object(oid)) {
          // Cached copies persist; only the provenance flag flips.
          rec->deleted_at_origin = true;
        }
      }
      break;
    }
  }

  // Homes addressed on the notify list pick up their inbox entries here.
  if (act.payload.contains("notify") && act.payload["notify"].is_array()) {
    for (const auto& entry : act.payload["notify"]) {
      auto who = parse_social_id(entry.get<std::string>());
      if (who && who.value().authority == site.domain) {
        ensure_actor_known(sim, site, who.value());
        notify_actor(site, who.value(), act.id);
      }
    }
  }

  targets.erase(site.domain);
  site.activity_store[act.id] = act;

  outcome.applied = result == "applied";
  outcome.result = result;
  outcome.relayed = act;

  Document detail = Document::object();
  detail["activity"] = act.id;
  detail["result"] = result;
  detail["verb"] = to_string(act.verb);
  sim.trace_event(site.domain, "apply", std::move(detail));
  return outcome;
}

void record_and_fanout(Simulation& sim, SiteNode& acting_site, Activity activity) {
  ApplyOutcome outcome = apply_inbound(sim, acting_site, std::move(activity), true);
  Document doc = outcome.relayed.to_document();
  for (const auto& target : outcome.relay_targets) {
    sim.post_notification(acting_site.domain, target, doc);
  }
}

void handle_inbox(Simulation& sim, SiteNode& site, const Envelope& env,
                  const Document& body) {
  auto parsed = Activity::from_document(body);
  if (!parsed) {
    Document detail = Document::object();
    detail["id"] = env.message_id;
    if (parsed.error().code == Errc::unknown_target) {
      // Unknown verb: log and skip, but remember the id so redeliveries dedupe.
      detail["reason"] = "unknown_verb";
      detail["detail"] = parsed.error().detail;
      if (body.is_object() && body.contains("id")) {
        site.applied_activities.insert(body["id"].get<std::string>());
      }
    } else {
      detail["reason"] = "malformed_document";
    }
    sim.trace_event(site.domain, "reject", std::move(detail));
    return;
  }
  ApplyOutcome outcome = apply_inbound(sim, site, std::move(parsed).take(), false);
  if (outcome.result == "duplicate") return;
  Document doc = outcome.relayed.to_document();
  for (const auto& target : outcome.relay_targets) {
    sim.post_notification(site.domain, target, doc);
  }
}

Result<Activity> perform(Simulation& sim, const Session& session, Verb verb,
                         const Ref& object, Document payload) {
  SiteNode& site = sim.site(session.site);
  ActorRecord* actor_rec = site.find_actor(session.actor);
  if (!actor_rec || actor_rec->kind == ActorKind::alien) {
    return Error(Errc::forbidden, "no session record at " + session.site);
  }

  Activity act;
  act.verb = verb;
  act.actor = session.actor;
  act.payload = std::move(payload);
  act.published = sim.now();

  switch (verb) {
    case Verb::follow:
    case Verb::unfollow: {
      const SocialID* followed = std::get_if<SocialID>(&object);
      if (!followed) return Error(Errc::unknown_target, "follow needs an actor");
      if (*followed == session.actor) return Error(Errc::self_follow);
      if (followed->authority == site.domain) {
        if (!site.find_actor(*followed)) return Error(Errc::unknown_target, followed->text());
      } else if (!identity::resolve(sim, site.domain, *followed)) {
        return Error(Errc::unknown_target, followed->text());
      }
      act.object = *followed;
      break;
    }
    case Verb::reply: {
      const ObjectID* target = std::get_if<ObjectID>(&object);
      if (!target) return Error(Errc::unknown_target, "reply needs an object");
      objects::CreateSpec spec;
      spec.content_type = ContentType::text;
      spec.payload = act.payload.value("text", "");
      spec.audience = Audience::public_audience();
      spec.emit_activities = false;
      auto comment = objects::create_object(sim, session, spec);
      if (!comment) return comment.error();
      act.payload.erase("text");
      act.payload["comment"] = comment.value().id.text();
      act.object = comment.value().id;
      act.target = *target;
      break;
    }
    case Verb::rate: {
      const ObjectID* target = std::get_if<ObjectID>(&object);
      if (!target) return Error(Errc::unknown_target, "rate needs an object");
      if (!act.payload.contains("value") || !act.payload["value"].is_number_integer()) {
        return Error(Errc::unknown_target, "rate needs an integer value");
      }
      act.object = *target;
      act.target = *target;
      break;
    }
    case Verb::mention: {
      const ObjectID* context = std::get_if<ObjectID>(&object);
      if (!context) return Error(Errc::unknown_target, "mention needs a context object");
      if (!act.payload.contains("mentions") || !act.payload["mentions"].is_array() ||
          act.payload["mentions"].empty()) {
        return Error(Errc::unknown_target, "mention needs a mentions list");
      }
      for (const auto& entry : act.payload["mentions"]) {
        auto id = parse_social_id(entry.get<std::string>());
        if (!id) return Error(Errc::unknown_target, entry.get<std::string>());
        if (id.value().authority != site.domain &&
            !identity::resolve(sim, site.domain, id.value())) {
          return Error(Errc::unknown_target, id.value().text());
        }
      }
      act.object = *context;
      break;
    }
    case Verb::reshare: {
      const ObjectID* oid = std::get_if<ObjectID>(&object);
      if (!oid) return Error(Errc::unknown_target, "reshare needs an object");
      if (!act.payload.contains("provenance")) {
        return Error(Errc::unknown_target, "reshare needs a provenance activity id");
      }
      act.object = *oid;
      break;
    }
    default:
      return Error(Errc::forbidden, "verb is emitted by its owning operation");
  }

  act.id = site.issue_activity_id();
  record_and_fanout(sim, site, act);
  return act;
}

Result<ActivityFeed> timeline(Simulation& sim, const std::string& site_domain,
                              const SocialID& actor) {
  SiteNode& site = sim.site(site_domain);
  ActorRecord* rec = site.find_actor(actor);
  if (!rec) return Error(Errc::unknown_actor, actor.text());
  ActivityFeed feed;
  feed.subject = actor;
  feed.as_of = sim.now();
  for (const auto& id : rec->timeline) {
    auto it = site.activity_store.find(id);
    if (it != site.activity_store.end()) feed.entries.push_back(it->second);
  }
  sort_newest_first(feed.entries);
  return feed;
}

Result<Subscription> subscribe_activities(Simulation& sim, const std::string& remote_site,
                                          const Ref& subject,
                                          std::optional<SocialID> on_behalf) {
  if (const SocialID* actor = std::get_if<SocialID>(&subject)) {
    if (actor->authority == remote_site) {
      return Error(Errc::unknown_subject, "subject is native here");
    }
    Document body = Document::object();
    body["subscriber_site"] = remote_site;
    if (on_behalf) body["on_behalf_of"] = on_behalf->text();
    auto resp = sim.sync_request(remote_site, actor->authority,
                                 "/feed/" + actor->local + "/subscribe", body);
    if (!resp) return resp.error();
    if (resp.value().value("status", "") != "ok") return status_error(resp.value());
    Subscription sub;
    sub.topic = Subscription::Topic::actor_activities;
    sub.subject = actor->text();
    sub.subscriber_site = remote_site;
    sub.created = resp.value().value("created", std::uint64_t{0});
    sub.on_behalf_of = on_behalf;
    return sub;
  }
  if (const ObjectID* oid = std::get_if<ObjectID>(&subject)) {
    if (oid->authority == remote_site) {
      return Error(Errc::unknown_subject, "subject is native here");
    }
    Document body = Document::object();
    body["subscriber_site"] = remote_site;
    body["subscribe_only"] = true;
    if (on_behalf) body["requester"] = on_behalf->text();
    auto resp = sim.sync_request(remote_site, oid->authority,
                                 "/object/" + oid->local + "/subscribe", body);
    if (!resp) return resp.error();
    if (resp.value().value("status", "") != "ok") return status_error(resp.value());
    Subscription sub;
    sub.topic = Subscription::Topic::object;
    sub.subject = oid->text();
    sub.subscriber_site = remote_site;
    sub.created = resp.value().value("created", std::uint64_t{0});
    sub.on_behalf_of = on_behalf;
    return sub;
  }
  return Error(Errc::unknown_subject, "empty subject");
}

Result<Document> publish_feed(Simulation& sim, const std::string& site_domain,
                              const Ref& subject, const Principal& requester) {
  SiteNode& site = sim.site(site_domain);
  ActivityFeed feed;
  feed.subject = subject;
  feed.as_of = sim.now();
  if (const SocialID* actor = std::get_if<SocialID>(&subject)) {
    ActorRecord* rec = site.find_actor(*actor);
    if (!rec) return Error(Errc::unknown_subject, actor->text());
    for (const auto& id : rec->timeline) {
      auto it = site.activity_store.find(id);
      if (it != site.activity_store.end() && entry_visible(site, it->second, requester)) {
        feed.entries.push_back(it->second);
      }
    }
  } else if (const ObjectID* oid = std::get_if<ObjectID>(&subject)) {
    if (!site.find_object(*oid)) return Error(Errc::unknown_subject, oid->text());
    for (const auto& [id, act] : site.activity_store) {
      const ObjectID* obj = std::get_if<ObjectID>(&act.object);
      const ObjectID* tgt = std::get_if<ObjectID>(&act.target);
      if (((obj && *obj == *oid) || (tgt && *tgt == *oid)) &&
          entry_visible(site, act, requester)) {
        feed.entries.push_back(act);
      }
    }
  } else {
    return Error(Errc::unknown_subject, "empty subject");
  }
  sort_newest_first(feed.entries);
  return feed.to_document();
}

void emit_profile_update(Simulation& sim, SiteNode& home, const SocialID& subject,
                         const std::string& changed_attribute) {
  ActorRecord* rec = home.find_actor(subject);
  if (!rec) return;

  Activity act;
  act.id = home.issue_activity_id();
  act.verb = Verb::profile_update;
  act.actor = subject;
  act.object = subject;
  act.payload["attribute"] = changed_attribute;
  act.payload["revision"] = rec->profile.revision;
  act.published = sim.now();
  apply_inbound(sim, home, act, true);

  for (const auto& sub : home.subscriptions) {
    if (sub.topic != Subscription::Topic::profile || sub.subject != subject.text()) continue;
    const ScopeGrant* grant = privacy::find_grant(home, subject, sub.subscriber_site);
    auto filtered = privacy::filter_attributes(rec->profile, grant);
    if (!filtered.empty()) {
      Principal who = Principal::for_site(sub.subscriber_site);
      ProfileScope scope{subject, "*"};
      sim.trace_decision(home.domain, who, scope, AccessAction::read, Decision::allowed());
    }
    Activity push = act;
    push.payload = Document::object();
    push.payload["revision"] = rec->profile.revision;
    push.payload["attributes"] = Document::object();
    for (const auto& [name, value] : filtered) push.payload["attributes"][name] = value;
    sim.post_notification(home.domain, sub.subscriber_site, push.to_document());
  }
}

void emit_object_update(Simulation& sim, SiteNode& content_site, const ObjectID& oid,
                        const SocialID& updater) {
  ObjectRecord* obj = content_site.find_object(oid);
  if (!obj) return;

  Activity act;
  act.id = content_site.issue_activity_id();
  act.verb = Verb::object_update;
  act.actor = updater;
  act.object = oid;
  act.payload["revision"] = obj->revision;
  act.payload["payload_hex"] = to_hex(obj->payload.value_or(""));
  act.published = sim.now();
  apply_inbound(sim, content_site, act, true);

  Document doc = act.to_document();
  for (const auto& sub : content_site.subscriptions) {
    if (sub.topic != Subscription::Topic::object || sub.subject != oid.text()) continue;
    Principal who = sub.on_behalf_of
                        ? Principal::for_actor(*sub.on_behalf_of, sub.subscriber_site)
                        : Principal::for_site(sub.subscriber_site);
    Decision d = privacy::authorize(content_site, who, oid, AccessAction::read);
    sim.trace_decision(content_site.domain, who, oid, AccessAction::read, d);
    if (!d.allow) continue;
    sim.post_notification(content_site.domain, sub.subscriber_site, doc);
  }
}

void emit_object_delete(Simulation& sim, SiteNode& content_site, const ObjectID& oid,
                        const SocialID& deleter) {
  Activity act;
  act.id = content_site.issue_activity_id();
  act.verb = Verb::object_delete;
  act.actor = deleter;
  act.object = oid;
  act.published = sim.now();
  apply_inbound(sim, content_site, act, true);

  Document doc = act.to_document();
  for (const auto& sub : content_site.subscriptions) {
    if (sub.topic != Subscription::Topic::object || sub.subject != oid.text()) continue;
    sim.post_notification(content_site.domain, sub.subscriber_site, doc);
  }
}

}  // namespace activities

}  // namespace fedsim
