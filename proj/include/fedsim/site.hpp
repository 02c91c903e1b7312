#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fedsim/model.hpp"
#include "fedsim/privacy.hpp"
#include "fedsim/wire.hpp"

namespace fedsim {

struct Session {
  std::string site;
  SocialID actor;
  ActorKind kind = ActorKind::native;
};

struct Subscription {
  enum class Topic { actor_activities, profile, object };

  Topic topic = Topic::actor_activities;
  std::string subject;  // canonical id text
  std::string subscriber_site;
  std::uint64_t created = 0;
  // Actor context for payload-bearing pushes; empty for reference-only topics.
  std::optional<SocialID> on_behalf_of;
};

const char* to_string(Subscription::Topic t);

// An unacknowledged notification awaiting retry.
struct PendingSend {
  Envelope env;
  int retries_left = 0;
};

// One federated site: every store the protocol touches, plus the outbox retry
// state. All mutation happens inside the owning simulation's turn.
struct SiteNode {
  std::string domain;

  std::map<SocialID, ActorRecord> actors;
  std::map<std::string, std::string> credentials;  // local name -> salted digest
  std::map<ObjectID, ObjectRecord> objects;
  // (grantor text, grantee site) -> grant, stored at the grantor's home site.
  std::map<std::pair<std::string, std::string>, ScopeGrant> grants;
  std::vector<Subscription> subscriptions;
  std::map<std::string, Activity> activity_store;  // everything recorded or received
  std::set<std::string> applied_activities;        // exactly-once guard
  std::set<std::string> seen_nonces;
  std::map<SocialID, std::set<SocialID>> wall_permissions;  // owner -> allowed posters

  std::vector<PendingSend> outbox;

  std::uint64_t next_activity = 1;
  std::uint64_t next_message = 1;
  std::uint64_t next_nonce = 1;
  std::uint64_t next_object = 1;

  explicit SiteNode(std::string d = {}) : domain(std::move(d)) {}

  ActorRecord* find_actor(const SocialID& id);
  const ActorRecord* find_actor(const SocialID& id) const;
  ObjectRecord* find_object(const ObjectID& id);
  const ObjectRecord* find_object(const ObjectID& id) const;

  std::string issue_activity_id() { return domain + "/" + std::to_string(next_activity++); }
  std::string issue_message_id() { return domain + "/" + std::to_string(next_message++); }
  std::string issue_nonce() { return "nonce-" + domain + "-" + std::to_string(next_nonce++); }
  std::string issue_object_key() { return "obj" + std::to_string(next_object++); }

  // Creates a bare alien record when the id is unknown here.
  ActorRecord& ensure_alien_stub(const SocialID& id);

  Subscription* find_subscription(Subscription::Topic topic, const std::string& subject,
                                  const std::string& subscriber_site);
  void upsert_subscription(Subscription sub);
  void drop_subscription(Subscription::Topic topic, const std::string& subject,
                         const std::string& subscriber_site);
};

}  // namespace fedsim
