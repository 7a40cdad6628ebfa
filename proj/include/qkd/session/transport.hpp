#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace qkd::session {

// Reliable ordered duplex byte stream. recv_exact blocks until the bytes
// arrive, the peer closes (returns false at a clean message boundary only
// if nothing was read), or the timeout expires (TransportError).
class Transport {
  public:
    virtual ~Transport() = default;
    virtual void send(const std::vector<uint8_t>& bytes) = 0;
    virtual bool recv_exact(uint8_t* out, size_t n) = 0;
    virtual void close() = 0;
};

// In-process pair of byte queues, one per direction.
class LoopbackPair {
  public:
    LoopbackPair();
    Transport& a();
    Transport& b();

    // Test hook: flips one bit in the k-th message a() sends from now on
    // (k = 0 meaning the next one), corrupting it in transit.
    void tamper_next_from_a(uint32_t k, uint32_t bit);

    // Same, but armed for the next message of the given wire type; `bit`
    // indexes into the payload. Decoding still succeeds, so the corruption
    // surfaces only at the authentication check.
    void tamper_type_from_a(uint8_t type, uint32_t payload_bit);

    struct Queue {
        std::mutex mu;
        std::condition_variable cv;
        std::deque<uint8_t> data;
        bool closed = false;
        double timeout_s = 30.0;
    };

  private:
    struct End;
    std::shared_ptr<Queue> ab_, ba_;
    std::shared_ptr<End> a_, b_;
};

// Blocking TCP transport.
class TcpTransport : public Transport {
  public:
    static std::unique_ptr<TcpTransport> listen_accept(const std::string& host,
                                                       uint16_t port,
                                                       double timeout_s = 60.0);
    static std::unique_ptr<TcpTransport> connect(const std::string& host,
                                                 uint16_t port,
                                                 double timeout_s = 60.0);
    ~TcpTransport() override;

    void send(const std::vector<uint8_t>& bytes) override;
    bool recv_exact(uint8_t* out, size_t n) override;
    void close() override;

  private:
    explicit TcpTransport(int fd) : fd_(fd) {}
    int fd_ = -1;
};

// One framed message over a transport. recv_message returns false on clean
// close before any byte of a message.
void send_message_bytes(Transport& t, const std::vector<uint8_t>& encoded);
bool recv_message_bytes(Transport& t, std::vector<uint8_t>& encoded);

std::pair<std::string, uint16_t> parse_endpoint(const std::string& hostport);

}  // namespace qkd::session
