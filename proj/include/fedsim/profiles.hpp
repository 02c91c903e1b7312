#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fedsim/simulation.hpp"
#include "fedsim/site.hpp"

namespace fedsim::profiles {

// Profile as visible to the requesting site under its granted scope; caches an
// alien copy at the requesting site.
Result<ProfileDoc> get_profile(Simulation& sim, const std::string& requesting_site,
                               const SocialID& id);

Result<Subscription> subscribe_profile(Simulation& sim, const std::string& remote_site,
                                       const SocialID& id);

// Self-update at the home site, or a remote write under a writable-attribute
// grant. Returns the new revision.
Result<std::uint64_t> update_profile_attribute(Simulation& sim, const Session& session,
                                               const SocialID& id, const std::string& name,
                                               const std::string& value);

Result<ContactCollection> get_contacts(Simulation& sim, const std::string& requesting_site,
                                       const SocialID& id);

Result<std::vector<ObjectID>> get_collection(Simulation& sim,
                                             const std::string& requesting_site,
                                             const SocialID& id, const std::string& name,
                                             const std::optional<SocialID>& on_behalf = {});

// Follow performed by a foreign session, pushed back to the actor's identity
// site so the home contact list converges.
Result<Activity> propagate_foreign_contact(Simulation& sim, const Session& session,
                                           const SocialID& followed);

// Home-site mutation core shared by the self path and the remote-write handler.
Result<std::uint64_t> set_attribute_at_home(Simulation& sim, SiteNode& home,
                                            const SocialID& id, const std::string& name,
                                            const std::string& value);

}  // namespace fedsim::profiles
