#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "fedsim/site.hpp"
#include "fedsim/wire.hpp"

namespace fedsim {

struct LinkParams {
  int delay_max = 1;       // ticks, >= 1
  double loss_p = 0.0;     // [0,1]
  double reorder_p = 0.0;  // [0,1]
  bool up = true;          // false models a hard partition
};

struct Topology {
  std::vector<std::string> sites;
  std::map<std::pair<std::string, std::string>, LinkParams> links;
  LinkParams defaults;
  std::uint64_t seed = 0;

  bool has_site(const std::string& domain) const;
  const LinkParams& link(const std::string& from, const std::string& to) const;
  LinkParams& link_mut(const std::string& from, const std::string& to);
};

struct TraceEvent {
  std::uint64_t tick = 0;
  std::string site;
  std::string kind;  // send, drop, deliver, apply, reject, decision
  Document detail;
  std::uint64_t seq = 0;

  Document to_document() const;
};

struct Trace {
  std::vector<TraceEvent> events;

  void emit(std::uint64_t tick, const std::string& site, const std::string& kind,
            Document detail);
  std::string to_text() const;  // one canonical document per line
};

// Outcome of an endpoint handler; feeds both the response envelope and the
// audit-relevant fields of its deliver event.
struct HandlerResult {
  Document response = Document::object();
  bool payload_bearing = false;
  std::string audit_principal;
  std::string audit_resource;
};

// Deterministic discrete-event scheduler over a set of SiteNodes. Owns all
// site state; one logical thread of control.
class Simulation {
 public:
  explicit Simulation(Topology topology, int retry_cap = 16);

  SiteNode& site(const std::string& domain);
  const SiteNode& site(const std::string& domain) const;
  bool has_site(const std::string& domain) const { return topology_.has_site(domain); }
  const std::vector<std::string>& site_names() const { return topology_.sites; }

  Topology& topology() { return topology_; }
  const Topology& topology() const { return topology_; }

  std::uint64_t now() const { return tick_; }
  int retry_cap() const { return retry_cap_; }

  bool quiescent() const;
  // Advances one tick; refuses when there is nothing in flight or pending.
  Status step();
  // Advances n ticks whether or not traffic exists (scenario time).
  void advance(std::uint64_t ticks);
  // Steps until quiescent; false when max_ticks elapsed first.
  bool run_until_quiescent(std::uint64_t max_ticks = 100000);

  // Reliable request/response between two routed sites (the client-server
  // paths of the protocol). Fails with unreachable when no route exists.
  Result<Document> sync_request(const std::string& from, const std::string& to,
                                const std::string& endpoint, const Document& body);

  // At-least-once notification; retried every tick until acknowledged or the
  // retry cap is exhausted. Receivers dedupe on activity id.
  Status post_notification(const std::string& from, const std::string& to,
                           const Document& body);

  const PairKey& pair_key(const std::string& from, const std::string& to);

  Trace& trace() { return trace_; }
  const Trace& trace() const { return trace_; }
  void trace_event(const std::string& site, const std::string& kind, Document detail);
  void trace_decision(const std::string& serving_site, const Principal& who,
                      const Resource& what, AccessAction action, const Decision& decision);

  // Test hook: swallow matching inbound envelopes (no apply, no ack).
  std::function<bool(const Envelope&)> inbound_fault;

  // Native-object payload cap in bytes.
  std::size_t payload_cap = 64 * 1024;

 private:
  struct InFlight {
    Envelope env;
    std::uint64_t deliver_tick = 0;
    std::uint64_t ordinal = 0;
  };

  struct LinkRuntime {
    std::mt19937_64 rng;
    std::uint64_t fifo_tick = 0;  // last scheduled delivery of an in-order envelope
  };

  Envelope make_envelope(const std::string& from, const std::string& to,
                         const std::string& endpoint, const Document& body);
  // Transport admission: draws loss/delay/reorder; returns false on hard
  // unreachable (unknown destination).
  Status route(const Envelope& env);
  LinkRuntime& link_runtime(const std::string& from, const std::string& to);
  void deliver_due();
  void retry_pending();
  void handle_delivery(const Envelope& env);
  void process_inbox_envelope(const Envelope& env);

  Topology topology_;
  int retry_cap_;
  std::uint64_t tick_ = 0;
  std::uint64_t next_ordinal_ = 1;
  std::map<std::string, SiteNode> sites_;
  std::map<std::pair<std::string, std::string>, LinkRuntime> link_runtimes_;
  std::map<std::pair<std::string, std::string>, PairKey> pair_keys_;
  std::vector<InFlight> in_flight_;
  Trace trace_;
};

// Server side of every synchronous endpoint; implemented in handlers.cpp.
HandlerResult dispatch_endpoint(Simulation& sim, SiteNode& serving, const Envelope& env,
                                const Document& body);

// Maps a non-ok response status back to the protocol error vocabulary.
Error status_error(const Document& response);

}  // namespace fedsim
