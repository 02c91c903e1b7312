#include "fedsim/site.hpp"

#include <algorithm>

namespace fedsim {

const char* to_string(Subscription::Topic t) {
  switch (t) {
    case Subscription::Topic::actor_activities: return "actor_activities";
    case Subscription::Topic::profile: return "profile";
    case Subscription::Topic::object: return "object";
  }
  return "?";
}

ActorRecord* SiteNode::find_actor(const SocialID& id) {
  auto it = actors.find(id);
  return it == actors.end() ? nullptr : &it->second;
}

const ActorRecord* SiteNode::find_actor(const SocialID& id) const {
  auto it = actors.find(id);
  return it == actors.end() ? nullptr : &it->second;
}

ObjectRecord* SiteNode::find_object(const ObjectID& id) {
  auto it = objects.find(id);
  return it == objects.end() ? nullptr : &it->second;
}

const ObjectRecord* SiteNode::find_object(const ObjectID& id) const {
  auto it = objects.find(id);
  return it == objects.end() ? nullptr : &it->second;
}

ActorRecord& SiteNode::ensure_alien_stub(const SocialID& id) {
  auto it = actors.find(id);
  if (it != actors.end()) return it->second;
  ActorRecord rec;
  rec.id = id;
  rec.kind = id.authority == domain ? ActorKind::native : ActorKind::alien;
  rec.home_site = id.authority;
  rec.profile.owner = id;
  return actors.emplace(id, std::move(rec)).first->second;
}

Subscription* SiteNode::find_subscription(Subscription::Topic topic,
                                          const std::string& subject,
                                          const std::string& subscriber_site) {
  for (auto& sub : subscriptions) {
    if (sub.topic == topic && sub.subject == subject &&
        sub.subscriber_site == subscriber_site) {
      return &sub;
    }
  }
  return nullptr;
}

void SiteNode::upsert_subscription(Subscription sub) {
  if (auto* existing = find_subscription(sub.topic, sub.subject, sub.subscriber_site)) {
    if (sub.on_behalf_of) existing->on_behalf_of = sub.on_behalf_of;
    return;
  }
  subscriptions.push_back(std::move(sub));
}

void SiteNode::drop_subscription(Subscription::Topic topic, const std::string& subject,
                                 const std::string& subscriber_site) {
  subscriptions.erase(
      std::remove_if(subscriptions.begin(), subscriptions.end(),
                     [&](const Subscription& s) {
                       return s.topic == topic && s.subject == subject &&
                              s.subscriber_site == subscriber_site;
                     }),
      subscriptions.end());
}

}  // namespace fedsim
