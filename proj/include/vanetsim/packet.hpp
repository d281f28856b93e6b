#pragma once

#include <any>
#include <array>
#include <cstdint>
#include <memory>
#include <string_view>

#include "vanetsim/engine.hpp"

namespace vanetsim {

/// Network-layer protocol discriminator. Data is application payload; the
/// rest are routing control messages.
enum class MessageType : std::uint8_t {
  Data,
  AodvRreq,
  AodvRrep,
  AodvRerr,
  DymoRreq,
  DymoRrep,
  DymoRerr,
  OlsrHello,
  OlsrTc,
  IarpUpdate,
  IerpQuery,
  IerpReply,
  IerpError,
};

inline constexpr std::size_t kMessageTypeCount = 13;

std::string_view to_string(MessageType t);
inline bool is_control(MessageType t) { return t != MessageType::Data; }

/// Minimal network datagram: addressing, TTL, discriminator and an opaque
/// body. `body` holds the agent-specific control record for control types.
struct NetPacket {
  std::uint64_t uid = 0;
  NodeId src = 0;
  NodeId dst = 0;  // kBroadcast for one-hop control floods
  int ttl = 64;
  MessageType type = MessageType::Data;
  std::uint32_t header_bytes = 20;
  std::uint32_t body_bytes = 0;  // payload or control-record size
  std::any body;

  // Application bookkeeping (Data only).
  std::uint32_t session = 0;
  std::uint64_t app_seq = 0;
  SimTime created;

  std::uint32_t wire_bytes() const { return header_bytes + body_bytes; }
};

enum class FrameKind : std::uint8_t { Rts, Cts, Data, Ack };
std::string_view to_string(FrameKind k);

struct MacFrame {
  FrameKind kind = FrameKind::Data;
  NodeId src = 0;
  NodeId dst = 0;
  SimTime duration;  // NAV reservation
  std::uint32_t header_bytes = 0;
  std::uint16_t mac_seq = 0;
  bool retry = false;
  std::shared_ptr<const NetPacket> payload;  // DATA only
  std::uint32_t payload_bytes = 0;

  std::uint32_t total_bytes() const { return header_bytes + payload_bytes; }
  std::uint64_t bits() const { return static_cast<std::uint64_t>(total_bytes()) * 8; }
};

}  // namespace vanetsim
