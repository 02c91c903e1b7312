#include "fedsim/identity.hpp"

namespace fedsim::identity {

Document DiscoveryDoc::to_document() const {
  Document doc = Document::object();
  doc["subject"] = subject.text();
  doc["profile_endpoint"] = profile_endpoint;
  doc["feed_endpoint"] = feed_endpoint;
  doc["inbox_endpoint"] = inbox_endpoint;
  doc["hub_endpoint"] = hub_endpoint;
  return doc;
}

Document AuthAssertion::to_document() const {
  Document doc = Document::object();
  doc["subject"] = subject.text();
  doc["issued_by"] = issued_by;
  doc["nonce"] = nonce;
  doc["token"] = to_hex(std::string_view(reinterpret_cast<const char*>(token.data()),
                                         token.size()));
  return doc;
}

Result<AuthAssertion> AuthAssertion::from_document(const Document& doc) {
  for (const char* field : {"subject", "issued_by", "nonce", "token"}) {
    if (!doc.contains(field)) return Error(Errc::malformed_document, field);
  }
  auto subject = parse_social_id(doc["subject"].get<std::string>());
  if (!subject) return Error(Errc::malformed_document, "subject");
  auto token_bytes = from_hex(doc["token"].get<std::string>());
  if (!token_bytes || token_bytes.value().size() != 32) {
    return Error(Errc::malformed_document, "token");
  }
  AuthAssertion assertion;
  assertion.subject = subject.value();
  assertion.issued_by = doc["issued_by"].get<std::string>();
  assertion.nonce = doc["nonce"].get<std::string>();
  std::copy(token_bytes.value().begin(), token_bytes.value().end(),
            reinterpret_cast<char*>(assertion.token.data()));
  return assertion;
}

std::string assertion_signing_input(const SocialID& subject, const std::string& issued_by,
                                    const std::string& nonce) {
  Document doc = Document::object();
  doc["issued_by"] = issued_by;
  doc["nonce"] = nonce;
  doc["subject"] = subject.text();
  return canonical_encode(doc);
}

std::string credential_digest(const std::string& site_domain, const std::string& local_name,
                              const std::string& credential) {
  PairKey salt{};
  std::string salt_text = site_domain + "|" + local_name;
  for (size_t i = 0; i < salt_text.size(); ++i) {
    salt[i % salt.size()] ^= static_cast<unsigned char>(salt_text[i]);
  }
  AuthTag digest = keyed_digest(salt, credential);
  return to_hex(std::string_view(reinterpret_cast<const char*>(digest.data()), digest.size()));
}

DiscoveryDoc discovery_for(const SocialID& id) {
  DiscoveryDoc doc;
  doc.subject = id;
  doc.profile_endpoint = "/profile/" + id.local;
  doc.feed_endpoint = "/feed/" + id.local;
  doc.inbox_endpoint = "/inbox";
  doc.hub_endpoint = "/inbox";  // hub-less fan-out: notifications go straight to inboxes
  return doc;
}

Result<ActorRecord> register_native(Simulation& sim, const std::string& site_domain,
                                    const std::string& local_name,
                                    const std::string& credential) {
  SiteNode& site = sim.site(site_domain);
  if (!valid_local_name(local_name)) return Error(Errc::invalid_name, local_name);
  if (site.credentials.count(local_name)) return Error(Errc::name_taken, local_name);

  SocialID id{IdScheme::acct, site_domain, local_name};
  if (site.find_actor(id)) return Error(Errc::name_taken, local_name);

  ActorRecord rec;
  rec.id = id;
  rec.kind = ActorKind::native;
  rec.home_site = site_domain;
  rec.profile.owner = id;
  site.credentials[local_name] = credential_digest(site_domain, local_name, credential);
  return site.actors.emplace(id, std::move(rec)).first->second;
}

Result<Session> login_native(Simulation& sim, const std::string& site_domain,
                             const std::string& local_name, const std::string& credential) {
  SiteNode& site = sim.site(site_domain);
  auto it = site.credentials.find(local_name);
  if (it == site.credentials.end()) return Error(Errc::unknown_actor, local_name);
  if (it->second != credential_digest(site_domain, local_name, credential)) {
    return Error(Errc::bad_credential);
  }
  SocialID id{IdScheme::acct, site_domain, local_name};
  return Session{site_domain, id, ActorKind::native};
}

Result<DiscoveryDoc> resolve(Simulation& sim, const std::string& requesting_site,
                             const SocialID& id) {
  if (id.authority == requesting_site) {
    SiteNode& site = sim.site(requesting_site);
    ActorRecord* rec = site.find_actor(id);
    if (!rec || rec->kind != ActorKind::native) return Error(Errc::unknown_actor, id.text());
    return discovery_for(id);
  }

  Document body = Document::object();
  body["subject"] = id.text();
  auto resp = sim.sync_request(requesting_site, id.authority, "/.well-known/social", body);
  if (!resp) return resp.error();
  const Document& doc = resp.value();
  if (doc.value("status", "") != "ok") return status_error(doc);

  DiscoveryDoc discovery;
  discovery.subject = id;
  discovery.profile_endpoint = doc.value("profile_endpoint", "");
  discovery.feed_endpoint = doc.value("feed_endpoint", "");
  discovery.inbox_endpoint = doc.value("inbox_endpoint", "");
  discovery.hub_endpoint = doc.value("hub_endpoint", "");

  sim.site(requesting_site).ensure_alien_stub(id);
  return discovery;
}

Result<AuthAssertion> issue_assertion(Simulation& sim, const Session& home_session,
                                      const std::string& remote_site) {
  if (home_session.kind != ActorKind::native ||
      home_session.site != home_session.actor.authority) {
    return Error(Errc::forbidden, "assertions are issued to native home sessions");
  }
  SiteNode& home = sim.site(home_session.site);
  AuthAssertion assertion;
  assertion.subject = home_session.actor;
  assertion.issued_by = home.domain;
  assertion.nonce = home.issue_nonce();
  assertion.token = keyed_digest(
      sim.pair_key(home.domain, remote_site),
      assertion_signing_input(assertion.subject, assertion.issued_by, assertion.nonce));
  return assertion;
}

Result<Session> federated_login(Simulation& sim, const std::string& remote_site,
                                const AuthAssertion& assertion) {
  auto resp = sim.sync_request(assertion.issued_by, remote_site, "/login",
                               assertion.to_document());
  if (!resp) return resp.error();
  if (resp.value().value("status", "") != "ok") return status_error(resp.value());
  return Session{remote_site, assertion.subject, ActorKind::foreign};
}

Result<ActorRecord> promote_to_native(Simulation& sim, const std::string& remote_site,
                                      const Session& session, const std::string& local_name,
                                      const std::string& credential) {
  SiteNode& site = sim.site(remote_site);
  if (session.kind != ActorKind::foreign || session.site != remote_site) {
    return Error(Errc::forbidden, "promotion needs a foreign session here");
  }
  ActorRecord* old_rec = site.find_actor(session.actor);
  if (!old_rec || old_rec->kind != ActorKind::foreign) {
    return Error(Errc::forbidden, "no foreign record");
  }
  if (!valid_local_name(local_name)) return Error(Errc::invalid_name, local_name);
  if (site.credentials.count(local_name)) return Error(Errc::name_taken, local_name);
  SocialID new_id{IdScheme::acct, remote_site, local_name};
  if (site.find_actor(new_id)) return Error(Errc::name_taken, local_name);

  ActorRecord rec = *old_rec;
  rec.id = new_id;
  rec.kind = ActorKind::native;
  rec.home_site = remote_site;
  rec.profile.owner = new_id;
  rec.profile.attributes["x-also-known-as"] = session.actor.text();
  rec.profile.revision += 1;

  SocialID old_id = session.actor;
  site.actors.erase(old_id);
  site.credentials[local_name] = credential_digest(remote_site, local_name, credential);
  ActorRecord& stored = site.actors.emplace(new_id, std::move(rec)).first->second;
  activities::emit_profile_update(sim, site, new_id, "x-also-known-as");
  return stored;
}

}  // namespace fedsim::identity
