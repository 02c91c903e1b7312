#pragma once

#include <optional>
#include <set>
#include <string>

#include "fedsim/simulation.hpp"
#include "fedsim/site.hpp"

namespace fedsim::objects {

struct CreateSpec {
  ContentType content_type = ContentType::generic;
  std::string payload;
  Audience audience;
  std::optional<SocialID> owner;     // defaults to the session actor
  std::optional<std::string> local_key;
  std::set<SocialID> mentions;       // tagged actors, notified at creation
  std::set<SocialID> editors;        // write grants beyond author/owner
  bool emit_activities = true;       // reply comments suppress the post activity
};

// Creates a native object at the session's site and emits post (plus own and
// mention) activities.
Result<ObjectRecord> create_object(Simulation& sim, const Session& session,
                                   const CreateSpec& spec);

// Lets `poster` create objects owned by the session actor at this site.
Status allow_wall_post(Simulation& sim, const Session& owner_session, const SocialID& poster);

// Grants an actor write access to an existing native object.
Status add_editor(Simulation& sim, const Session& owner_session, const ObjectID& oid,
                  const SocialID& editor);

// Brings a remote object into this site, either as a bare reference or as a
// cached copy subscribed to updates.
Result<ObjectRecord> import_alien(Simulation& sim, const std::string& remote_site,
                                  const ObjectID& oid, AlienMode mode,
                                  const SocialID& requester);

// Serves payload bytes, enforcing the audience both at caches and at the
// content site.
Result<std::string> fetch_representation(Simulation& sim, const ObjectID& oid,
                                         const SocialID& requester,
                                         const std::string& via_site);

Result<std::uint64_t> update_object(Simulation& sim, const Session& session,
                                    const ObjectID& oid, const std::string& new_payload);

Status delete_object(Simulation& sim, const Session& session, const ObjectID& oid);

// Applies an edit to a foreign copy and forwards it to the content site, which
// assigns the authoritative revision.
Result<std::uint64_t> edit_foreign_object(Simulation& sim, const Session& remote_session,
                                          const ObjectID& oid, const std::string& patch);

}  // namespace fedsim::objects
