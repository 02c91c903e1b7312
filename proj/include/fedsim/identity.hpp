#pragma once

#include <string>

#include "fedsim/simulation.hpp"
#include "fedsim/site.hpp"

namespace fedsim::identity {

struct DiscoveryDoc {
  SocialID subject;
  std::string profile_endpoint;
  std::string feed_endpoint;
  std::string inbox_endpoint;
  std::string hub_endpoint;

  Document to_document() const;
};

struct AuthAssertion {
  SocialID subject;
  std::string issued_by;  // subject's home authority
  std::string nonce;
  AuthTag token{};

  Document to_document() const;
  static Result<AuthAssertion> from_document(const Document& doc);
};

// Signing input for an assertion under the (home, remote) pair key.
std::string assertion_signing_input(const SocialID& subject, const std::string& issued_by,
                                    const std::string& nonce);

Result<ActorRecord> register_native(Simulation& sim, const std::string& site_domain,
                                    const std::string& local_name,
                                    const std::string& credential);

Result<Session> login_native(Simulation& sim, const std::string& site_domain,
                             const std::string& local_name, const std::string& credential);

// Dereferences a Social ID. Cross-site resolution creates or refreshes an
// alien record at the requesting site.
Result<DiscoveryDoc> resolve(Simulation& sim, const std::string& requesting_site,
                             const SocialID& id);

// Home-site half of federated login; requires an authenticated native session.
Result<AuthAssertion> issue_assertion(Simulation& sim, const Session& home_session,
                                      const std::string& remote_site);

Result<Session> federated_login(Simulation& sim, const std::string& remote_site,
                                const AuthAssertion& assertion);

Result<ActorRecord> promote_to_native(Simulation& sim, const std::string& remote_site,
                                      const Session& session, const std::string& local_name,
                                      const std::string& credential);

std::string credential_digest(const std::string& site_domain, const std::string& local_name,
                              const std::string& credential);

}  // namespace fedsim::identity
