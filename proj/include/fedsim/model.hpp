#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "fedsim/document.hpp"
#include "fedsim/ids.hpp"

namespace fedsim {

// How an entity relates to the site storing it. Applies to actors and, by
// analogy, to objects.
enum class ActorKind { native, alien, foreign };
const char* to_string(ActorKind kind);

enum class ContentType { text, photo, generic };
const char* to_string(ContentType t);
std::optional<ContentType> parse_content_type(std::string_view s);

// Alien objects either point at the content site or hold a refreshed copy.
enum class AlienMode { reference, cache };
const char* to_string(AlienMode m);

enum class AudiencePolicy { pub, followers_only, listed };
const char* to_string(AudiencePolicy p);

struct Audience {
  AudiencePolicy policy = AudiencePolicy::pub;
  std::set<SocialID> listed;  // non-empty iff policy == listed

  static Audience public_audience() { return {}; }
  static Audience followers() { return {AudiencePolicy::followers_only, {}}; }
  static Audience listed_only(std::set<SocialID> ids) {
    return {AudiencePolicy::listed, std::move(ids)};
  }
  Document to_document() const;
  static Result<Audience> from_document(const Document& doc);
};

struct RatingAggregate {
  std::uint64_t count = 0;
  std::int64_t sum = 0;
};

// name/avatar_ref/location/email/bio/website, plus "x-" extensions.
bool recognized_attribute(std::string_view name);

struct ProfileDoc {
  std::map<std::string, std::string> attributes;
  std::uint64_t revision = 0;  // strictly increases on every mutation
  SocialID owner;
};

// Unidirectional relations; following never implies followers.
struct ContactCollection {
  std::set<SocialID> following;
  std::set<SocialID> followers;
};

enum class Verb {
  follow,
  unfollow,
  post,
  own,
  reply,
  rate,
  mention,
  reshare,
  profile_update,
  object_update,
  object_delete,
};
const char* to_string(Verb v);
std::optional<Verb> parse_verb(std::string_view s);

// Activities point at an object, an actor, or nothing, depending on the verb.
using Ref = std::variant<std::monostate, SocialID, ObjectID>;
std::string ref_text(const Ref& ref);
Ref parse_ref(std::string_view text);  // monostate when text is empty

struct Activity {
  std::string id;  // "<authority>/<counter>", issued by the acting site
  Verb verb = Verb::post;
  SocialID actor;
  Ref object;
  Ref target;
  Document payload = Document::object();
  std::uint64_t published = 0;  // simulation tick

  Document to_document() const;
  static Result<Activity> from_document(const Document& doc);
};

struct ObjectRecord {
  ObjectID id;
  ActorKind kind = ActorKind::native;
  ContentType content_type = ContentType::generic;
  AlienMode mode = AlienMode::cache;      // meaningful when kind != native
  std::optional<std::string> payload;     // absent in reference mode
  std::uint64_t cached_revision = 0;      // cache mode only
  std::uint64_t revision = 0;             // authoritative at the content site
  SocialID author;
  SocialID owner;
  Audience audience;
  std::vector<ObjectID> reply_collection;
  std::map<SocialID, std::int64_t> ratings;  // latest rating per actor
  std::set<SocialID> mentioned;              // tagged at creation
  std::set<SocialID> editors;                // write grants beyond author/owner
  bool deleted = false;                      // tombstone at the content site
  bool deleted_at_origin = false;            // provenance flag on retained caches
  std::uint64_t created_tick = 0;

  RatingAggregate rating_aggregate() const;
};

struct ActorRecord {
  SocialID id;
  ActorKind kind = ActorKind::native;
  std::string home_site;
  ProfileDoc profile;
  ContactCollection contacts;
  std::map<std::string, std::vector<ObjectID>> object_collections;
  std::vector<std::string> timeline;       // activity ids, append order
  std::vector<std::string> notifications;  // activity ids addressed to this actor
};

bool valid_collection_name(std::string_view name);  // owned/authored/favorites or x-

}  // namespace fedsim
