#include "fedsim/simulation.hpp"

#include <algorithm>
#include <cassert>

#include "fedsim/activities.hpp"

namespace fedsim {

bool Topology::has_site(const std::string& domain) const {
  return std::find(sites.begin(), sites.end(), domain) != sites.end();
}

const LinkParams& Topology::link(const std::string& from, const std::string& to) const {
  auto it = links.find({from, to});
  return it == links.end() ? defaults : it->second;
}

LinkParams& Topology::link_mut(const std::string& from, const std::string& to) {
  auto it = links.find({from, to});
  if (it == links.end()) it = links.emplace(std::make_pair(from, to), defaults).first;
  return it->second;
}

Document TraceEvent::to_document() const {
  Document doc = Document::object();
  doc["detail"] = detail;
  doc["kind"] = kind;
  doc["seq"] = seq;
  doc["site"] = site;
  doc["tick"] = tick;
  return doc;
}

void Trace::emit(std::uint64_t tick, const std::string& site, const std::string& kind,
                 Document detail) {
  TraceEvent ev;
  ev.tick = tick;
  ev.site = site;
  ev.kind = kind;
  ev.detail = std::move(detail);
  ev.seq = events.size() + 1;
  events.push_back(std::move(ev));
}

std::string Trace::to_text() const {
  std::string out;
  for (const auto& ev : events) {
    out += canonical_encode(ev.to_document());
    out += '\n';
  }
  return out;
}

namespace {

double uniform01(std::mt19937_64& rng) {
  // 53-bit mantissa draw; stable across platforms, unlike the distribution
  // adaptors in <random>.
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

std::uint64_t uniform_int(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  return lo + rng() % (hi - lo + 1);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Notifications carrying attribute values or object bytes are the
// payload-bearing ones the privacy audit cares about.
bool notification_payload_bearing(const Document& body) {
  if (!body.is_object() || !body.contains("payload")) return false;
  const Document& payload = body["payload"];
  if (!payload.is_object()) return false;
  if (payload.contains("attributes") && !payload["attributes"].empty()) return true;
  if (payload.contains("payload_hex") && !payload["payload_hex"].get<std::string>().empty()) {
    return true;
  }
  return false;
}

std::string notification_resource(const Document& body) {
  if (!body.is_object()) return {};
  std::string verb = body.value("verb", "");
  std::string object = body.value("object", "");
  if (verb == "profile_update") return "profile:" + object + "#*";
  return object;
}

}  // namespace

Simulation::Simulation(Topology topology, int retry_cap)
    : topology_(std::move(topology)), retry_cap_(retry_cap) {
  for (const auto& domain : topology_.sites) {
    sites_.emplace(domain, SiteNode(domain));
  }
}

SiteNode& Simulation::site(const std::string& domain) {
  auto it = sites_.find(domain);
  assert(it != sites_.end());
  return it->second;
}

const SiteNode& Simulation::site(const std::string& domain) const {
  auto it = sites_.find(domain);
  assert(it != sites_.end());
  return it->second;
}

const PairKey& Simulation::pair_key(const std::string& from, const std::string& to) {
  auto it = pair_keys_.find({from, to});
  if (it == pair_keys_.end()) {
    it = pair_keys_.emplace(std::make_pair(from, to),
                            derive_pair_key(topology_.seed, from, to)).first;
  }
  return it->second;
}

void Simulation::trace_event(const std::string& site, const std::string& kind,
                             Document detail) {
  trace_.emit(tick_, site, kind, std::move(detail));
}

void Simulation::trace_decision(const std::string& serving_site, const Principal& who,
                                const Resource& what, AccessAction action,
                                const Decision& decision) {
  Document detail = Document::object();
  detail["action"] = to_string(action);
  detail["allow"] = decision.allow;
  detail["principal"] = who.text();
  detail["resource"] = resource_text(what);
  if (!decision.allow) detail["reason"] = to_string(decision.reason);
  trace_event(serving_site, "decision", std::move(detail));
}

bool Simulation::quiescent() const {
  if (!in_flight_.empty()) return false;
  for (const auto& [domain, node] : sites_) {
    if (!node.outbox.empty()) return false;
  }
  return true;
}

Status Simulation::step() {
  if (quiescent()) return Error(Errc::quiescent, "nothing in flight");
  advance(1);
  return ok_status();
}

void Simulation::advance(std::uint64_t ticks) {
  for (std::uint64_t i = 0; i < ticks; ++i) {
    ++tick_;
    deliver_due();
    retry_pending();
  }
}

bool Simulation::run_until_quiescent(std::uint64_t max_ticks) {
  for (std::uint64_t i = 0; i < max_ticks; ++i) {
    if (quiescent()) return true;
    advance(1);
  }
  return quiescent();
}

Envelope Simulation::make_envelope(const std::string& from, const std::string& to,
                                   const std::string& endpoint, const Document& body) {
  Envelope env;
  env.from_site = from;
  env.to_site = to;
  env.endpoint = endpoint;
  env.message_id = site(from).issue_message_id();
  env.body = canonical_encode(body);
  env.sent_tick = tick_;
  sign_envelope(env, pair_key(from, to));
  return env;
}

Simulation::LinkRuntime& Simulation::link_runtime(const std::string& from,
                                                  const std::string& to) {
  auto it = link_runtimes_.find({from, to});
  if (it == link_runtimes_.end()) {
    LinkRuntime rt;
    rt.rng.seed(topology_.seed ^ (fnv1a(from) * 3) ^ (fnv1a(to) * 7) ^ 0x9e3779b97f4a7c15ull);
    it = link_runtimes_.emplace(std::make_pair(from, to), std::move(rt)).first;
  }
  return it->second;
}

Status Simulation::route(const Envelope& env) {
  if (!topology_.has_site(env.to_site)) {
    return Error(Errc::unreachable, "unknown site " + env.to_site);
  }
  const LinkParams& params = topology_.link(env.from_site, env.to_site);
  Document base = Document::object();
  base["endpoint"] = env.endpoint;
  base["from"] = env.from_site;
  base["id"] = env.message_id;
  base["to"] = env.to_site;
  if (!params.up) {
    Document detail = base;
    detail["reason"] = "link_down";
    trace_event(env.from_site, "drop", std::move(detail));
    return ok_status();
  }
  LinkRuntime& rt = link_runtime(env.from_site, env.to_site);
  if (params.loss_p > 0 && uniform01(rt.rng) < params.loss_p) {
    Document detail = base;
    detail["reason"] = "loss";
    trace_event(env.from_site, "drop", std::move(detail));
    return ok_status();
  }
  std::uint64_t delay = uniform_int(rt.rng, 1, static_cast<std::uint64_t>(params.delay_max));
  bool disorder = params.reorder_p > 0 && uniform01(rt.rng) < params.reorder_p;
  std::uint64_t deliver_tick = tick_ + delay;
  if (!disorder) {
    deliver_tick = std::max(deliver_tick, rt.fifo_tick);
    rt.fifo_tick = deliver_tick;
  }
  in_flight_.push_back({env, deliver_tick, next_ordinal_++});
  return ok_status();
}

Status Simulation::post_notification(const std::string& from, const std::string& to,
                                     const Document& body) {
  if (!topology_.has_site(to)) return Error(Errc::unreachable, "unknown site " + to);
  Envelope env = make_envelope(from, to, "/inbox", body);
  Document detail = Document::object();
  detail["endpoint"] = env.endpoint;
  detail["from"] = from;
  detail["id"] = env.message_id;
  detail["payload"] = notification_payload_bearing(body);
  detail["to"] = to;
  trace_event(from, "send", std::move(detail));
  site(from).outbox.push_back({env, retry_cap_});
  return route(env);
}

Result<Document> Simulation::sync_request(const std::string& from, const std::string& to,
                                          const std::string& endpoint,
                                          const Document& body) {
  assert(from != to);
  if (!topology_.has_site(to)) return Error(Errc::unreachable, "unknown site " + to);
  if (!topology_.link(from, to).up || !topology_.link(to, from).up) {
    return Error(Errc::unreachable, "link down");
  }

  Envelope req = make_envelope(from, to, endpoint, body);
  Document req_detail = Document::object();
  req_detail["endpoint"] = endpoint;
  req_detail["from"] = from;
  req_detail["id"] = req.message_id;
  req_detail["payload"] = false;
  req_detail["to"] = to;
  trace_event(from, "send", req_detail);
  trace_event(to, "deliver", req_detail);

  SiteNode& serving = site(to);
  HandlerResult hr = dispatch_endpoint(*this, serving, req, body);

  Envelope resp = make_envelope(to, from, endpoint, hr.response);
  Document resp_detail = Document::object();
  resp_detail["endpoint"] = endpoint;
  resp_detail["from"] = to;
  resp_detail["id"] = resp.message_id;
  resp_detail["payload"] = hr.payload_bearing;
  resp_detail["to"] = from;
  if (!hr.audit_principal.empty()) resp_detail["principal"] = hr.audit_principal;
  if (!hr.audit_resource.empty()) resp_detail["resource"] = hr.audit_resource;
  trace_event(to, "send", resp_detail);
  trace_event(from, "deliver", resp_detail);

  return hr.response;
}

void Simulation::deliver_due() {
  std::vector<InFlight> due;
  for (auto it = in_flight_.begin(); it != in_flight_.end();) {
    if (it->deliver_tick <= tick_) {
      due.push_back(std::move(*it));
      it = in_flight_.erase(it);
    } else {
      ++it;
    }
  }
  std::sort(due.begin(), due.end(), [](const InFlight& a, const InFlight& b) {
    auto ka = std::tuple_cat(std::make_tuple(a.env.to_site), split_message_id(a.env.message_id),
                             std::make_tuple(a.ordinal));
    auto kb = std::tuple_cat(std::make_tuple(b.env.to_site), split_message_id(b.env.message_id),
                             std::make_tuple(b.ordinal));
    return ka < kb;
  });
  for (const auto& item : due) handle_delivery(item.env);
}

void Simulation::retry_pending() {
  for (auto& [domain, node] : sites_) {
    for (auto it = node.outbox.begin(); it != node.outbox.end();) {
      if (it->env.sent_tick >= tick_) {
        ++it;
        continue;
      }
      if (it->retries_left <= 0) {
        Document detail = Document::object();
        detail["endpoint"] = it->env.endpoint;
        detail["from"] = it->env.from_site;
        detail["id"] = it->env.message_id;
        detail["reason"] = "retries_exhausted";
        detail["to"] = it->env.to_site;
        trace_event(domain, "drop", std::move(detail));
        it = node.outbox.erase(it);
        continue;
      }
      --it->retries_left;
      route(it->env);
      ++it;
    }
  }
}

void Simulation::handle_delivery(const Envelope& env) {
  SiteNode& dst = site(env.to_site);
  Document base = Document::object();
  base["endpoint"] = env.endpoint;
  base["from"] = env.from_site;
  base["id"] = env.message_id;
  base["to"] = env.to_site;

  if (inbound_fault && inbound_fault(env)) {
    Document detail = base;
    detail["reason"] = "fault_injected";
    trace_event(env.to_site, "drop", std::move(detail));
    return;
  }

  if (!verify_envelope(env, pair_key(env.from_site, env.to_site))) {
    Document detail = base;
    detail["reason"] = "bad_token";
    trace_event(env.to_site, "reject", std::move(detail));
    return;
  }

  auto body = canonical_decode(env.body);
  if (!body) {
    Document detail = base;
    detail["reason"] = "malformed_document";
    trace_event(env.to_site, "reject", std::move(detail));
    return;
  }

  if (env.endpoint == "/ack") {
    Document detail = base;
    detail["payload"] = false;
    trace_event(env.to_site, "deliver", std::move(detail));
    std::string ack_of = body.value().value("ack_of", "");
    auto& outbox = dst.outbox;
    outbox.erase(std::remove_if(outbox.begin(), outbox.end(),
                                [&](const PendingSend& p) {
                                  return p.env.message_id == ack_of;
                                }),
                 outbox.end());
    return;
  }

  if (env.endpoint == "/inbox") {
    Document detail = base;
    detail["payload"] = notification_payload_bearing(body.value());
    std::string resource = notification_resource(body.value());
    if (!resource.empty()) detail["resource"] = resource;
    trace_event(env.to_site, "deliver", std::move(detail));
    activities::handle_inbox(*this, dst, env, body.value());
    Document ack_body = Document::object();
    ack_body["ack_of"] = env.message_id;
    Envelope ack = make_envelope(env.to_site, env.from_site, "/ack", ack_body);
    Document ack_detail = Document::object();
    ack_detail["endpoint"] = "/ack";
    ack_detail["from"] = env.to_site;
    ack_detail["id"] = ack.message_id;
    ack_detail["payload"] = false;
    ack_detail["to"] = env.from_site;
    trace_event(env.to_site, "send", std::move(ack_detail));
    route(ack);
    return;
  }

  Document detail = base;
  detail["reason"] = "unknown_endpoint";
  trace_event(env.to_site, "reject", std::move(detail));
}

Error status_error(const Document& response) {
  std::string status = response.value("status", "malformed_document");
  for (int i = 0; i <= static_cast<int>(Errc::assertion_failure); ++i) {
    Errc code = static_cast<Errc>(i);
    if (status == to_string(code)) return Error(code, response.value("detail", ""));
  }
  return Error(Errc::malformed_document, "unrecognized status " + status);
}

}  // namespace fedsim
