#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fedsim/model.hpp"
#include "fedsim/simulation.hpp"
#include "fedsim/site.hpp"

namespace fedsim {

struct ActivityFeed {
  Ref subject;
  std::vector<Activity> entries;  // newest first
  std::uint64_t as_of = 0;

  Document to_document() const;
};

namespace activities {

// Performs a verb at the session's site: the activity is recorded there,
// applied to local state, and side effects fan out per verb. Covers follow,
// unfollow, reply, rate, mention, reshare (post/own are emitted by
// objects::create_object).
Result<Activity> perform(Simulation& sim, const Session& session, Verb verb,
                         const Ref& object, Document payload = Document::object());

Result<ActivityFeed> timeline(Simulation& sim, const std::string& site_domain,
                              const SocialID& actor);

Result<Subscription> subscribe_activities(Simulation& sim, const std::string& remote_site,
                                          const Ref& subject,
                                          std::optional<SocialID> on_behalf = {});

Result<Document> publish_feed(Simulation& sim, const std::string& site_domain,
                              const Ref& subject, const Principal& requester);

// Outcome of applying one activity at one site.
struct ApplyOutcome {
  bool applied = false;
  std::string result;                   // applied, duplicate, denied, skipped
  Activity relayed;                     // possibly enriched for downstream sites
  std::set<std::string> relay_targets;  // domains to notify next
};

// Verb-indexed native-content change; exactly-once per (site, activity id).
ApplyOutcome apply_inbound(Simulation& sim, SiteNode& site, Activity activity,
                           bool performed_here);

// Inbox half of the deliver pipeline: parse, dedupe, apply, relay. Token
// verification happens in the transport before this is reached.
void handle_inbox(Simulation& sim, SiteNode& site, const Envelope& env,
                  const Document& body);

// Records a freshly performed activity and routes its fan-out.
void record_and_fanout(Simulation& sim, SiteNode& acting_site, Activity activity);

// Change-notification emitters used by the profile and object modules.
void emit_profile_update(Simulation& sim, SiteNode& home, const SocialID& subject,
                         const std::string& changed_attribute);
void emit_object_update(Simulation& sim, SiteNode& content_site, const ObjectID& oid,
                        const SocialID& updater);
void emit_object_delete(Simulation& sim, SiteNode& content_site, const ObjectID& oid,
                        const SocialID& deleter);

// Fetches or creates the record for an activity's actor, resolving remotely
// when the actor is unknown here.
ActorRecord& ensure_actor_known(Simulation& sim, SiteNode& site, const SocialID& id);

}  // namespace activities

}  // namespace fedsim
