#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qkd::session {

// Framed message layout, all header integers big-endian:
//   u32  length of everything after this field (17 + payload size)
//   u8   type
//   u64  frame_id
//   u64  sequence number (strictly increasing per direction)
//   payload bytes
// Payload integers are big-endian too; packed bit strings use the BitVec
// byte layout (LSB-first within each byte).
enum class MsgType : uint8_t {
    BasisAnnounce = 0x01,
    SampleDisclose = 0x02,
    Syndrome = 0x03,
    VerifyHash = 0x04,
    PaSeed = 0x05,
    AuthTag = 0x06,
    Abort = 0x07,
    FrameAck = 0x08,
};

struct WireMessage {
    MsgType type = MsgType::Abort;
    uint64_t frame_id = 0;
    uint64_t seq = 0;
    std::vector<uint8_t> payload;
};

constexpr uint32_t kHeaderAfterLength = 17;  // type + frame_id + seq
constexpr uint32_t kMaxPayload = 1u << 24;

std::vector<uint8_t> encode_message(const WireMessage& msg);
// Decodes one complete framed message (length prefix included).
WireMessage decode_message(const std::vector<uint8_t>& bytes);

// Payload cursor helpers shared by the state machines.
class PayloadWriter {
  public:
    void u8(uint8_t v) { buf_.push_back(v); }
    void u32(uint32_t v);
    void u64(uint64_t v);
    void bytes(const std::vector<uint8_t>& b);
    std::vector<uint8_t> take() { return std::move(buf_); }

  private:
    std::vector<uint8_t> buf_;
};

class PayloadReader {
  public:
    explicit PayloadReader(const std::vector<uint8_t>& buf) : buf_(buf) {}
    uint8_t u8();
    uint32_t u32();
    uint64_t u64();
    std::vector<uint8_t> bytes(size_t n);
    size_t remaining() const { return buf_.size() - pos_; }
    void expect_end() const;

  private:
    const std::vector<uint8_t>& buf_;
    size_t pos_ = 0;
};

const char* msg_type_name(MsgType t);

}  // namespace qkd::session
