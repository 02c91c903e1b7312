#include "fedsim/model.hpp"

namespace fedsim {

const char* to_string(ActorKind kind) {
  switch (kind) {
    case ActorKind::native: return "native";
    case ActorKind::alien: return "alien";
    case ActorKind::foreign: return "foreign";
  }
  return "?";
}

const char* to_string(ContentType t) {
  switch (t) {
    case ContentType::text: return "text";
    case ContentType::photo: return "photo";
    case ContentType::generic: return "generic";
  }
  return "?";
}

std::optional<ContentType> parse_content_type(std::string_view s) {
  if (s == "text") return ContentType::text;
  if (s == "photo") return ContentType::photo;
  if (s == "generic") return ContentType::generic;
  return std::nullopt;
}

const char* to_string(AlienMode m) {
  return m == AlienMode::reference ? "reference" : "cache";
}

const char* to_string(AudiencePolicy p) {
  switch (p) {
    case AudiencePolicy::pub: return "public";
    case AudiencePolicy::followers_only: return "followers_only";
    case AudiencePolicy::listed: return "listed";
  }
  return "?";
}

Document Audience::to_document() const {
  Document doc = Document::object();
  doc["policy"] = to_string(policy);
  if (policy == AudiencePolicy::listed) {
    Document ids = Document::array();
    for (const auto& id : listed) ids.push_back(id.text());
    doc["listed"] = std::move(ids);
  }
  return doc;
}

Result<Audience> Audience::from_document(const Document& doc) {
  if (!doc.is_object() || !doc.contains("policy")) {
    return Error(Errc::malformed_document, "audience");
  }
  std::string policy = doc["policy"].get<std::string>();
  if (policy == "public") return Audience::public_audience();
  if (policy == "followers_only") return Audience::followers();
  if (policy == "listed") {
    std::set<SocialID> ids;
    if (!doc.contains("listed") || !doc["listed"].is_array()) {
      return Error(Errc::malformed_document, "audience listed");
    }
    for (const auto& entry : doc["listed"]) {
      auto id = parse_social_id(entry.get<std::string>());
      if (!id) return Error(Errc::malformed_document, "audience member");
      ids.insert(id.value());
    }
    if (ids.empty()) return Error(Errc::malformed_document, "empty listed audience");
    return Audience::listed_only(std::move(ids));
  }
  return Error(Errc::malformed_document, "audience policy");
}

bool recognized_attribute(std::string_view name) {
  if (name.rfind("x-", 0) == 0 && name.size() > 2) return true;
  return name == "name" || name == "avatar_ref" || name == "location" ||
         name == "email" || name == "bio" || name == "website";
}

const char* to_string(Verb v) {
  switch (v) {
    case Verb::follow: return "follow";
    case Verb::unfollow: return "unfollow";
    case Verb::post: return "post";
    case Verb::own: return "own";
    case Verb::reply: return "reply";
    case Verb::rate: return "rate";
    case Verb::mention: return "mention";
    case Verb::reshare: return "reshare";
    case Verb::profile_update: return "profile_update";
    case Verb::object_update: return "object_update";
    case Verb::object_delete: return "object_delete";
  }
  return "?";
}

std::optional<Verb> parse_verb(std::string_view s) {
  if (s == "follow") return Verb::follow;
  if (s == "unfollow") return Verb::unfollow;
  if (s == "post") return Verb::post;
  if (s == "own") return Verb::own;
  if (s == "reply") return Verb::reply;
  if (s == "rate") return Verb::rate;
  if (s == "mention") return Verb::mention;
  if (s == "reshare") return Verb::reshare;
  if (s == "profile_update") return Verb::profile_update;
  if (s == "object_update") return Verb::object_update;
  if (s == "object_delete") return Verb::object_delete;
  return std::nullopt;
}

std::string ref_text(const Ref& ref) {
  if (std::holds_alternative<SocialID>(ref)) return std::get<SocialID>(ref).text();
  if (std::holds_alternative<ObjectID>(ref)) return std::get<ObjectID>(ref).text();
  return {};
}

Ref parse_ref(std::string_view text) {
  if (text.empty()) return std::monostate{};
  if (looks_like_social_id(text)) {
    auto id = parse_social_id(text);
    if (id) return id.value();
    return std::monostate{};
  }
  auto oid = parse_object_id(text);
  if (oid) return oid.value();
  return std::monostate{};
}

Document Activity::to_document() const {
  Document doc = Document::object();
  doc["id"] = id;
  doc["verb"] = to_string(verb);
  doc["actor"] = actor.text();
  doc["object"] = ref_text(object);
  if (!std::holds_alternative<std::monostate>(target)) doc["target"] = ref_text(target);
  doc["payload"] = payload;
  doc["published"] = published;
  return doc;
}

Result<Activity> Activity::from_document(const Document& doc) {
  if (!doc.is_object()) return Error(Errc::malformed_document, "activity");
  for (const char* field : {"id", "verb", "actor", "object", "published"}) {
    if (!doc.contains(field)) return Error(Errc::malformed_document, field);
  }
  Activity act;
  act.id = doc["id"].get<std::string>();
  auto verb = parse_verb(doc["verb"].get<std::string>());
  if (!verb) return Error(Errc::unknown_target, "verb " + doc["verb"].get<std::string>());
  act.verb = *verb;
  auto actor = parse_social_id(doc["actor"].get<std::string>());
  if (!actor) return Error(Errc::malformed_document, "actor");
  act.actor = actor.value();
  act.object = parse_ref(doc["object"].get<std::string>());
  if (doc.contains("target")) act.target = parse_ref(doc["target"].get<std::string>());
  if (doc.contains("payload")) act.payload = doc["payload"];
  act.published = doc["published"].get<std::uint64_t>();
  return act;
}

RatingAggregate ObjectRecord::rating_aggregate() const {
  RatingAggregate agg;
  agg.count = ratings.size();
  for (const auto& [actor, value] : ratings) agg.sum += value;
  return agg;
}

bool valid_collection_name(std::string_view name) {
  if (name.rfind("x-", 0) == 0 && name.size() > 2) return true;
  return name == "owned" || name == "authored" || name == "favorites";
}

}  // namespace fedsim
