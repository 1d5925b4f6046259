#pragma once
//
// Two-party messaging with explicit round and byte accounting.
//
// Wire format, one frame:
//
//   u32 length   big-endian, = 3 + payload size
//   u8  type     message discriminator (MsgType)
//   u16 session  big-endian, must match the channel's session id
//   u8  payload[length - 3]
//
// The 4-byte length prefix is transport overhead; accounted "wire" bytes
// are type + session + payload (so an 8-byte payload counts as 11 wire
// bytes), while protocol-level assertions use payload bytes only.
//
// A protocol round is one simultaneous exchange: both parties send, then
// both receive.  Channels expose exchange() as the only primitive the
// online protocols use, so SessionStats.rounds equals the number of
// exchanges regardless of payload batching.

#include <cstring>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lutmpc/errors.hpp"
#include "lutmpc/sha256.hpp"

namespace lutmpc {

enum class MsgType : u8 {
  kOpen = 1,        // masked-value / share openings
  kTableQuery = 2,  // blinded table-lookup keys
  kPoint = 3,       // compressed curve points
  kSync = 4,        // barriers, handshakes
  kData = 5,        // bulk data (model io, bundles)
};

constexpr u32 kMaxPayload = 1u << 30;

struct Frame {
  MsgType type;
  u16 session;
  std::vector<u8> payload;
};

// Serialize a frame to wire bytes (length prefix included).
std::vector<u8> encode_frame(MsgType type, u16 session,
                             const u8* payload, std::size_t n);

// Parse one frame from a buffer holding at least the length prefix.
// Returns bytes consumed; throws FrameCorrupt on malformed input and
// requires the full frame to be present.
std::size_t decode_frame(const u8* data, std::size_t n, Frame& out);

struct SessionStats {
  u64 rounds = 0;         // simultaneous exchanges completed
  u64 frames_sent = 0;
  u64 payload_bytes = 0;  // payload sent by this endpoint
  u64 wire_bytes = 0;     // payload + type + session per frame sent

  SessionStats operator-(const SessionStats& base) const {
    return {rounds - base.rounds, frames_sent - base.frames_sent,
            payload_bytes - base.payload_bytes, wire_bytes - base.wire_bytes};
  }
};

class Chan {
 public:
  explicit Chan(u16 session) : session_(session) {}
  virtual ~Chan() = default;

  // Send our payload and receive the peer's; counts as one round.  Both
  // parties must call exchange with the same type in the same order.
  std::vector<u8> exchange(MsgType type, const u8* payload, std::size_t n);
  std::vector<u8> exchange(MsgType type, const std::vector<u8>& payload) {
    return exchange(type, payload.data(), payload.size());
  }

  // Convenience: exchange a vector of ring elements (8 bytes each, LE).
  std::vector<u64> exchange_u64(MsgType type, const std::vector<u64>& vals);

  // One-way transfer for non-protocol traffic (bundle delivery, model io).
  // Does not advance the round counter.
  void send(MsgType type, const u8* payload, std::size_t n);
  Frame recv(MsgType expected_type);

  // Simulate link conditions: every exchange pays the round-trip latency
  // once plus transfer time for the bytes moved.  Wall-clock only; frame
  // content and accounting are unchanged.  Zero latency disables.
  void set_link_sim(double latency_ms, double mbit_per_s);

  const SessionStats& stats() const { return stats_; }
  u16 session() const { return session_; }

 protected:
  virtual void send_wire(const std::vector<u8>& wire) = 0;
  virtual Frame recv_frame() = 0;
  // Full-duplex send+receive; the default sends then receives, which is
  // safe on buffered transports.  TCP overrides it to interleave and avoid
  // mutual blocking on large frames.
  virtual Frame exchange_wire(const std::vector<u8>& wire);

  u16 session_;
  SessionStats stats_;
  double sim_latency_ms_ = 0;
  double sim_mbit_ = 0;
};

// In-process pair of channels backed by two byte queues; endpoint i's send
// is endpoint 1-i's receive.  Used by tests and single-process training.
struct LoopbackPair {
  explicit LoopbackPair(u16 session = 0);
  ~LoopbackPair();
  Chan& end(int party);
  // Wake any blocked receiver with IoError; used when one party dies so
  // the other cannot hang forever.
  void poison();

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

// TCP endpoints.  listen_and_accept blocks for one peer; connect_to
// retries until the listener is up or the attempt budget runs out.
std::unique_ptr<Chan> tcp_listen_and_accept(u16 port, u16 session);
std::unique_ptr<Chan> tcp_connect(const std::string& host, u16 port,
                                  u16 session);

// Run a two-party computation over a loopback pair on two threads.  Any
// exception thrown by either party is rethrown here (party 0's first).
void run_pair(const std::function<void(int, Chan&)>& body, u16 session = 0);

}  // namespace lutmpc
