// Gateway-side state machine for the two cross-layer mitigations, with a
// pluggable physical-layer verifier and a deterministic scenario runner.
//
// Admission: a device asking to associate must transmit an empty-packet
// burst; the gateway verifies the burst's propagation pattern and denies
// off-body senders. Deadlock defense: an authentication request naming an
// already-authenticated device never tears down that association. The
// gateway challenges instead, demands a burst from the requester, and drops
// the request when the burst verifies off-body.
//
// Every (phase, event) pair has a defined transition; events that make no
// sense in the current phase are ignored so a flood of garbage cannot crash
// or wedge the gateway.
//
// Copyright 2026 The banauth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "banauth/channel.hpp"
#include "banauth/model.hpp"
#include "banauth/profile.hpp"
#include "json.hpp"

namespace banauth {

using DeviceId = int;

enum class GatewayPhase : int {
  idle = 0,
  awaiting_burst,
  verifying,
  associated,
  data_transfer,
  suspicion_challenge,
  awaiting_suspect_burst,
};

inline constexpr int kNumGatewayPhases = 7;

inline const char* phase_name(GatewayPhase p) {
  static const char* names[] = {"idle",           "awaiting_burst",
                                "verifying",      "associated",
                                "data_transfer",  "suspicion_challenge",
                                "awaiting_suspect_burst"};
  return names[static_cast<int>(p)];
}

enum class MsgKind : int {
  assoc_request = 0,
  verify_ack,
  empty_packet_burst,
  assoc_accept,
  assoc_deny,
  auth_request,
  device_denial_challenge,
  drop_notice,
  data_frame,
};

inline constexpr int kNumMsgKinds = 9;

inline const char* msg_kind_name(MsgKind k) {
  static const char* names[] = {
      "assoc_request", "verify_ack",  "empty_packet_burst",
      "assoc_accept",  "assoc_deny",  "auth_request",
      "device_denial_challenge",      "drop_notice",
      "data_frame"};
  return names[static_cast<int>(k)];
}

inline MsgKind parse_msg_kind(const std::string& s) {
  for (int i = 0; i < kNumMsgKinds; ++i)
    if (s == msg_kind_name(static_cast<MsgKind>(i)))
      return static_cast<MsgKind>(i);
  throw std::invalid_argument("unknown message kind: " + s);
}

// claimed_sender is what the frame header says; actual_sender is ground
// truth visible only to the simulator (a spoofer sets them apart). Gateway
// emissions reuse the type with both sender fields holding the addressee.
struct Message {
  MsgKind kind = MsgKind::data_frame;
  DeviceId claimed_sender = 0;
  DeviceId actual_sender = 0;
  std::shared_ptr<const RssTrace> payload_trace;  // bursts only
};

struct VerifyDecision {
  bool on_body = false;
  double score = 0.0;  // probability-like, in [0, 1]
};

class Verifier {
 public:
  virtual ~Verifier() = default;
  virtual VerifyDecision verify(const RssTrace& burst) const = 0;
};

// Reads the simulator's ground-truth label. Exists for protocol tests that
// must not depend on any detector's error rate.
class OracleVerifier : public Verifier {
 public:
  VerifyDecision verify(const RssTrace& burst) const override {
    const bool on = burst.y == OnOff::on;
    return {on, on ? 1.0 : 0.0};
  }
};

// Non-learned baseline: on-body propagation keeps almost no energy above
// 15 Hz (only readout noise), while off-body fading and dense scatter are
// wideband. The ratio of mid-band to high-band variance is scale-free and
// separates the two regimes by more than a decade on simulated traces.
class ThresholdVerifier : public Verifier {
 public:
  explicit ThresholdVerifier(double ratio_cutoff = 12.0)
      : cutoff_(ratio_cutoff) {
    if (!(ratio_cutoff > 0.0))
      throw std::invalid_argument("ThresholdVerifier: cutoff must be positive");
  }

  VerifyDecision verify(const RssTrace& burst) const override {
    const BandDecomposition d = decompose(burst.signal);
    const double r = variance_of(d.band) / (variance_of(d.high) + 1e-12);
    return {r > cutoff_, r / (r + cutoff_)};
  }

 private:
  static double variance_of(const Signal& s) {
    double m = 0.0;
    for (double v : s.samples) m += v;
    m /= static_cast<double>(s.samples.size());
    double acc = 0.0;
    for (double v : s.samples) acc += (v - m) * (v - m);
    return acc / static_cast<double>(s.samples.size());
  }

  double cutoff_;
};

// Featurize one segment, normalize with the training-set statistics, and
// score with the trained model. Accepts on score > 0.5; a tie rejects.
class LearnedVerifier : public Verifier {
 public:
  LearnedVerifier(const Normalizer& norm, const ConvModel& model)
      : norm_(&norm), model_(&model) {}

  VerifyDecision verify(const RssTrace& burst) const override {
    const PropagationProfile p =
        build_profile(burst.signal, burst.y, burst.z, burst.v);
    const double s = model_->score_on(norm_->apply(p.features));
    return {s > 0.5, s};
  }

 private:
  const Normalizer* norm_;
  const ConvModel* model_;
};

struct GatewayConfig {
  double segment_s = 5.0;  // verification granularity, one profile per segment
  int burst_segments = 1;  // segments per challenge; majority vote when > 1
  // If a suspicion challenge stalls (device never denies, or the suspect
  // never sends its burst), the next event at or past this deadline first
  // returns the gateway to data transfer. Lazy check: no event, no timeout.
  double suspect_timeout = 30.0;
};

class Gateway {
 public:
  explicit Gateway(const GatewayConfig& cfg = {}) : cfg_(cfg) {
    if (cfg.burst_segments < 1 || !(cfg.segment_s > 0.0))
      throw std::invalid_argument("Gateway: bad burst configuration");
  }

  GatewayPhase phase() const { return phase_; }
  void set_phase(GatewayPhase p) { phase_ = p; }  // tests sweep all phases
  const std::map<DeviceId, bool>& associations() const { return assoc_; }
  bool authenticated(DeviceId id) const {
    auto it = assoc_.find(id);
    return it != assoc_.end() && it->second;
  }

  // Processes one event at logical time t. Returns the emitted messages.
  // Unhandled (phase, event) pairs leave the state unchanged and emit
  // nothing.
  std::vector<Message> step(const Message& m, double t, const Verifier& verifier) {
    std::vector<Message> out;
    expire_suspicion(t);
    switch (phase_) {
      case GatewayPhase::idle:
        if (m.kind == MsgKind::assoc_request) {
          pending_ = m.claimed_sender;
          phase_ = GatewayPhase::awaiting_burst;
          out.push_back(to_device(MsgKind::verify_ack, pending_));
        }
        break;

      case GatewayPhase::awaiting_burst:
        if (m.kind == MsgKind::empty_packet_burst &&
            m.claimed_sender == pending_ && m.payload_trace) {
          if (verify_burst(*m.payload_trace, verifier)) {
            assoc_[pending_] = true;
            phase_ = GatewayPhase::associated;
            out.push_back(to_device(MsgKind::assoc_accept, pending_));
          } else {
            phase_ = GatewayPhase::idle;
            out.push_back(to_device(MsgKind::assoc_deny, pending_));
            pending_ = -1;
          }
        }
        break;

      // transient while a verdict is computed; never holds between events
      case GatewayPhase::verifying:
        break;

      case GatewayPhase::associated:
        if (m.kind == MsgKind::data_frame && authenticated(m.claimed_sender))
          phase_ = GatewayPhase::data_transfer;
        break;

      case GatewayPhase::data_transfer:
        if (m.kind == MsgKind::auth_request && authenticated(m.claimed_sender)) {
          // someone claims an id that is already inside; do NOT drop the
          // existing association, challenge instead
          suspect_ = m.claimed_sender;
          suspicion_since_ = t;
          phase_ = GatewayPhase::suspicion_challenge;
          out.push_back(to_device(MsgKind::device_denial_challenge, suspect_));
        }
        break;

      case GatewayPhase::suspicion_challenge:
        if (m.kind == MsgKind::device_denial_challenge &&
            m.claimed_sender == suspect_) {
          // the associated device disowns the request; demand proof from
          // whoever is using that id
          phase_ = GatewayPhase::awaiting_suspect_burst;
          out.push_back(to_device(MsgKind::verify_ack, suspect_));
        }
        break;

      case GatewayPhase::awaiting_suspect_burst:
        if (m.kind == MsgKind::empty_packet_burst &&
            m.claimed_sender == suspect_ && m.payload_trace) {
          if (verify_burst(*m.payload_trace, verifier)) {
            // genuine re-authentication; the entry stays authenticated
            out.push_back(to_device(MsgKind::assoc_accept, suspect_));
          } else {
            out.push_back(to_device(MsgKind::drop_notice, suspect_));
          }
          phase_ = GatewayPhase::data_transfer;
          suspect_ = -1;
        }
        break;
    }
    return out;
  }

 private:
  static Message to_device(MsgKind kind, DeviceId id) {
    Message m;
    m.kind = kind;
    m.claimed_sender = id;
    m.actual_sender = id;
    return m;
  }

  void expire_suspicion(double t) {
    if ((phase_ == GatewayPhase::suspicion_challenge ||
         phase_ == GatewayPhase::awaiting_suspect_burst) &&
        t >= suspicion_since_ + cfg_.suspect_timeout) {
      // suspicion can only be entered from data transfer, so resume there
      phase_ = GatewayPhase::data_transfer;
      suspect_ = -1;
    }
  }

  // Majority vote over the first burst_segments segments; short or missing
  // bursts fail verification outright.
  bool verify_burst(const RssTrace& burst, const Verifier& verifier) const {
    const auto needed = static_cast<std::size_t>(cfg_.segment_s *
                                                 burst.signal.sample_rate_hz);
    if (burst.signal.samples.size() < needed || needed == 0) return false;
    const auto segs = segment(burst.signal, cfg_.segment_s);
    if (segs.empty()) return false;
    const int take = std::min<int>(cfg_.burst_segments,
                                   static_cast<int>(segs.size()));
    int on_votes = 0;
    for (int i = 0; i < take; ++i) {
      RssTrace piece;
      piece.signal = segs[static_cast<std::size_t>(i)];
      piece.y = burst.y;
      piece.z = burst.z;
      piece.v = burst.v;
      piece.seed = burst.seed;
      if (verifier.verify(piece).on_body) ++on_votes;
    }
    return 2 * on_votes > take;  // tie rejects
  }

  GatewayConfig cfg_;
  GatewayPhase phase_ = GatewayPhase::idle;
  std::map<DeviceId, bool> assoc_;
  DeviceId pending_ = -1;
  DeviceId suspect_ = -1;
  double suspicion_since_ = 0.0;
};

// --- scripted scenarios ---

struct ScriptEvent {
  double t = 0.0;
  MsgKind kind = MsgKind::data_frame;
  DeviceId claimed = 0;
  DeviceId actual = 0;
};

struct Scenario {
  std::vector<ScriptEvent> events;
  std::set<DeviceId> on_body{1};  // ids whose transmissions come from the body
  MotionClass z = MotionClass::walking;
  Environment v = Environment::laboratory;
  double fs = 500.0;
};

struct Transition {
  double t = 0.0;
  GatewayPhase before = GatewayPhase::idle;
  GatewayPhase after = GatewayPhase::idle;
  Message event;
  std::vector<Message> emitted;
};

using Transcript = std::vector<Transition>;

// Replays a time-ordered script against one gateway. Burst payloads are
// synthesized from the channel model using the ACTUAL sender's position, so
// a spoofed claim carries the attacker's physics. Deterministic in
// (scenario, verifier parameters, channel_seed).
inline Transcript run_scenario(const Scenario& sc, const Verifier& verifier,
                               std::uint64_t channel_seed,
                               const GatewayConfig& cfg = {}) {
  for (std::size_t i = 1; i < sc.events.size(); ++i)
    if (sc.events[i].t < sc.events[i - 1].t)
      throw std::invalid_argument("run_scenario: script not time-ordered");

  Gateway gw(cfg);
  Transcript out;
  out.reserve(sc.events.size());
  for (std::size_t i = 0; i < sc.events.size(); ++i) {
    const ScriptEvent& ev = sc.events[i];
    Message m;
    m.kind = ev.kind;
    m.claimed_sender = ev.claimed;
    m.actual_sender = ev.actual;
    if (ev.kind == MsgKind::empty_packet_burst) {
      const double dur = cfg.segment_s * cfg.burst_segments;
      const std::uint64_t seed =
          channel_seed ^ (0x9e3779b97f4a7c15ULL * (i + 1));
      m.payload_trace = std::make_shared<const RssTrace>(
          sc.on_body.count(ev.actual)
              ? gen_onbody_trace(sc.z, sc.v, dur, sc.fs, seed)
              : gen_offbody_trace(sc.v, dur, sc.fs, seed));
    }
    Transition tr;
    tr.t = ev.t;
    tr.before = gw.phase();
    tr.event = m;
    tr.emitted = gw.step(m, ev.t, verifier);
    tr.after = gw.phase();
    out.push_back(std::move(tr));
  }
  return out;
}

// Script JSON: either a bare array of events, or an object with optional
// "on_body", "motion", "environment", "fs" and a required "events" array.
// Each event is {"t": seconds, "kind": name, "claimed": id, "actual": id}.
inline Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario sc;
  const nlohmann::json* events = nullptr;
  if (j.is_array()) {
    events = &j;
  } else if (j.is_object() && j.contains("events")) {
    events = &j.at("events");
    if (j.contains("on_body")) {
      sc.on_body.clear();
      for (const auto& id : j.at("on_body")) sc.on_body.insert(id.get<int>());
    }
    if (j.contains("motion"))
      sc.z = parse_motion(j.at("motion").get<std::string>());
    if (j.contains("environment"))
      sc.v = parse_environment(j.at("environment").get<std::string>());
    if (j.contains("fs")) sc.fs = j.at("fs").get<double>();
  } else {
    throw std::invalid_argument("scenario: expected array or {events: [...]}");
  }
  if (!events->is_array())
    throw std::invalid_argument("scenario: events must be an array");
  for (const auto& e : *events) {
    ScriptEvent ev;
    ev.t = e.at("t").get<double>();
    ev.kind = parse_msg_kind(e.at("kind").get<std::string>());
    ev.claimed = e.at("claimed").get<int>();
    ev.actual = e.at("actual").get<int>();
    sc.events.push_back(ev);
  }
  return sc;
}

// One JSON object per line, one line per transition.
inline void write_transcript(std::ostream& os, const Transcript& transcript) {
  for (const auto& tr : transcript) {
    nlohmann::json j;
    j["t"] = tr.t;
    j["before"] = phase_name(tr.before);
    j["kind"] = msg_kind_name(tr.event.kind);
    j["claimed"] = tr.event.claimed_sender;
    j["actual"] = tr.event.actual_sender;
    j["after"] = phase_name(tr.after);
    auto& em = j["emitted"] = nlohmann::json::array();
    for (const auto& e : tr.emitted) {
      em.push_back({{"kind", msg_kind_name(e.kind)},
                    {"to", e.claimed_sender}});
    }
    os << j.dump() << "\n";
  }
}

}  // namespace banauth
