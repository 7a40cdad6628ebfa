#include "qkd/session/wire.hpp"

#include "qkd/errors.hpp"

namespace qkd::session {

namespace {

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
    put_u32(out, static_cast<uint32_t>(v >> 32));
    put_u32(out, static_cast<uint32_t>(v));
}

uint32_t get_u32(const std::vector<uint8_t>& b, size_t at) {
    return (uint32_t(b[at]) << 24) | (uint32_t(b[at + 1]) << 16) |
           (uint32_t(b[at + 2]) << 8) | uint32_t(b[at + 3]);
}

uint64_t get_u64(const std::vector<uint8_t>& b, size_t at) {
    return (uint64_t(get_u32(b, at)) << 32) | get_u32(b, at + 4);
}

bool known_type(uint8_t t) { return t >= 0x01 && t <= 0x08; }

}  // namespace

std::vector<uint8_t> encode_message(const WireMessage& msg) {
    if (msg.payload.size() > kMaxPayload)
        throw ProtocolError("payload too large to encode");
    std::vector<uint8_t> out;
    out.reserve(4 + kHeaderAfterLength + msg.payload.size());
    put_u32(out, kHeaderAfterLength + static_cast<uint32_t>(msg.payload.size()));
    out.push_back(static_cast<uint8_t>(msg.type));
    put_u64(out, msg.frame_id);
    put_u64(out, msg.seq);
    out.insert(out.end(), msg.payload.begin(), msg.payload.end());
    return out;
}

WireMessage decode_message(const std::vector<uint8_t>& bytes) {
    if (bytes.size() < 4 + kHeaderAfterLength)
        throw ProtocolError("truncated message header");
    uint32_t len = get_u32(bytes, 0);
    if (len < kHeaderAfterLength || len > kHeaderAfterLength + kMaxPayload)
        throw ProtocolError("bad message length field");
    if (bytes.size() != 4u + len) throw ProtocolError("message length mismatch");
    uint8_t t = bytes[4];
    if (!known_type(t))
        throw ProtocolError("unknown message type 0x" + std::to_string(t));

    WireMessage msg;
    msg.type = static_cast<MsgType>(t);
    msg.frame_id = get_u64(bytes, 5);
    msg.seq = get_u64(bytes, 13);
    msg.payload.assign(bytes.begin() + 4 + kHeaderAfterLength, bytes.end());
    return msg;
}

void PayloadWriter::u32(uint32_t v) { put_u32(buf_, v); }
void PayloadWriter::u64(uint64_t v) { put_u64(buf_, v); }
void PayloadWriter::bytes(const std::vector<uint8_t>& b) {
    buf_.insert(buf_.end(), b.begin(), b.end());
}

uint8_t PayloadReader::u8() {
    if (pos_ + 1 > buf_.size()) throw ProtocolError("payload underrun");
    return buf_[pos_++];
}

uint32_t PayloadReader::u32() {
    if (pos_ + 4 > buf_.size()) throw ProtocolError("payload underrun");
    uint32_t v = get_u32(buf_, pos_);
    pos_ += 4;
    return v;
}

uint64_t PayloadReader::u64() {
    if (pos_ + 8 > buf_.size()) throw ProtocolError("payload underrun");
    uint64_t v = get_u64(buf_, pos_);
    pos_ += 8;
    return v;
}

std::vector<uint8_t> PayloadReader::bytes(size_t n) {
    if (pos_ + n > buf_.size()) throw ProtocolError("payload underrun");
    std::vector<uint8_t> out(buf_.begin() + pos_, buf_.begin() + pos_ + n);
    pos_ += n;
    return out;
}

void PayloadReader::expect_end() const {
    if (pos_ != buf_.size()) throw ProtocolError("trailing bytes in payload");
}

const char* msg_type_name(MsgType t) {
    switch (t) {
        case MsgType::BasisAnnounce: return "BASIS_ANNOUNCE";
        case MsgType::SampleDisclose: return "SAMPLE_DISCLOSE";
        case MsgType::Syndrome: return "SYNDROME";
        case MsgType::VerifyHash: return "VERIFY_HASH";
        case MsgType::PaSeed: return "PA_SEED";
        case MsgType::AuthTag: return "AUTH_TAG";
        case MsgType::Abort: return "ABORT";
        case MsgType::FrameAck: return "FRAME_ACK";
    }
    return "?";
}

}  // namespace qkd::session
