#include "qkd/session/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstring>

#include "qkd/errors.hpp"
#include "qkd/session/wire.hpp"

namespace qkd::session {

namespace {
using Clock = std::chrono::steady_clock;
}

struct LoopbackPair::End : Transport {
    std::shared_ptr<Queue> out, in;
    uint32_t tamper_countdown = UINT32_MAX;
    uint32_t tamper_bit = 0;
    int tamper_type = -1;
    uint32_t tamper_payload_bit = 0;

    void send(const std::vector<uint8_t>& bytes) override {
        std::vector<uint8_t> copy = bytes;
        if (tamper_countdown != UINT32_MAX) {
            if (tamper_countdown == 0) {
                copy[(tamper_bit / 8) % copy.size()] ^=
                    uint8_t(1u << (tamper_bit % 8));
                tamper_countdown = UINT32_MAX;
            } else {
                --tamper_countdown;
            }
        }
        if (tamper_type >= 0 && copy.size() > 4 + kHeaderAfterLength &&
            copy[4] == static_cast<uint8_t>(tamper_type)) {
            size_t payload = copy.size() - 4 - kHeaderAfterLength;
            uint32_t b = tamper_payload_bit % (payload * 8);
            copy[4 + kHeaderAfterLength + b / 8] ^= uint8_t(1u << (b % 8));
            tamper_type = -1;
        }
        std::lock_guard<std::mutex> lk(out->mu);
        if (out->closed) throw TransportError("peer closed");
        out->data.insert(out->data.end(), copy.begin(), copy.end());
        out->cv.notify_all();
    }

    bool recv_exact(uint8_t* dst, size_t n) override {
        std::unique_lock<std::mutex> lk(in->mu);
        auto deadline = Clock::now() +
                        std::chrono::duration_cast<Clock::duration>(
                            std::chrono::duration<double>(in->timeout_s));
        size_t got = 0;
        while (got < n) {
            if (!in->data.empty()) {
                size_t take = std::min(n - got, in->data.size());
                for (size_t i = 0; i < take; ++i) {
                    dst[got + i] = in->data.front();
                    in->data.pop_front();
                }
                got += take;
                continue;
            }
            if (in->closed) {
                if (got == 0) return false;
                throw TransportError("stream closed mid-message");
            }
            if (in->cv.wait_until(lk, deadline) == std::cv_status::timeout)
                throw TransportError("receive timeout");
        }
        return true;
    }

    void close() override {
        for (auto& q : {out, in}) {
            std::lock_guard<std::mutex> lk(q->mu);
            q->closed = true;
            q->cv.notify_all();
        }
    }
};

LoopbackPair::LoopbackPair()
    : ab_(std::make_shared<Queue>()), ba_(std::make_shared<Queue>()) {
    a_ = std::make_shared<End>();
    a_->out = ab_;
    a_->in = ba_;
    b_ = std::make_shared<End>();
    b_->out = ba_;
    b_->in = ab_;
}

Transport& LoopbackPair::a() { return *a_; }
Transport& LoopbackPair::b() { return *b_; }

void LoopbackPair::tamper_next_from_a(uint32_t k, uint32_t bit) {
    a_->tamper_countdown = k;
    a_->tamper_bit = bit;
}

void LoopbackPair::tamper_type_from_a(uint8_t type, uint32_t payload_bit) {
    a_->tamper_type = type;
    a_->tamper_payload_bit = payload_bit;
}

namespace {

int make_socket() {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw TransportError("socket() failed");
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return fd;
}

sockaddr_in resolve(const std::string& host, uint16_t port) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (host.empty() || host == "*") {
        addr.sin_addr.s_addr = INADDR_ANY;
        return addr;
    }
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) == 1) return addr;
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (::getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || !res)
        throw TransportError("cannot resolve host: " + host);
    addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
    ::freeaddrinfo(res);
    return addr;
}

void set_timeout(int fd, double seconds) {
    timeval tv{};
    tv.tv_sec = static_cast<long>(seconds);
    tv.tv_usec = static_cast<long>((seconds - tv.tv_sec) * 1e6);
    ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
    ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
}

}  // namespace

std::unique_ptr<TcpTransport> TcpTransport::listen_accept(const std::string& host,
                                                          uint16_t port,
                                                          double timeout_s) {
    int lfd = make_socket();
    int one = 1;
    ::setsockopt(lfd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr = resolve(host, port);
    if (::bind(lfd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        ::close(lfd);
        throw TransportError("bind failed on port " + std::to_string(port));
    }
    if (::listen(lfd, 1) != 0) {
        ::close(lfd);
        throw TransportError("listen failed");
    }
    set_timeout(lfd, timeout_s);
    int fd = ::accept(lfd, nullptr, nullptr);
    ::close(lfd);
    if (fd < 0) throw TransportError("accept failed or timed out");
    set_timeout(fd, timeout_s);
    int nd = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &nd, sizeof nd);
    return std::unique_ptr<TcpTransport>(new TcpTransport(fd));
}

std::unique_ptr<TcpTransport> TcpTransport::connect(const std::string& host,
                                                    uint16_t port,
                                                    double timeout_s) {
    auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                       std::chrono::duration<double>(timeout_s));
    for (;;) {
        int fd = make_socket();
        sockaddr_in addr = resolve(host, port);
        if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0) {
            set_timeout(fd, timeout_s);
            return std::unique_ptr<TcpTransport>(new TcpTransport(fd));
        }
        ::close(fd);
        if (Clock::now() >= deadline)
            throw TransportError("connect failed: " + host + ":" +
                                 std::to_string(port));
        ::usleep(100000);  // peer may not be listening yet
    }
}

TcpTransport::~TcpTransport() { close(); }

void TcpTransport::send(const std::vector<uint8_t>& bytes) {
    size_t sent = 0;
    while (sent < bytes.size()) {
        ssize_t k = ::send(fd_, bytes.data() + sent, bytes.size() - sent,
                           MSG_NOSIGNAL);
        if (k <= 0) throw TransportError("send failed");
        sent += static_cast<size_t>(k);
    }
}

bool TcpTransport::recv_exact(uint8_t* out, size_t n) {
    size_t got = 0;
    while (got < n) {
        ssize_t k = ::recv(fd_, out + got, n - got, 0);
        if (k == 0) {
            if (got == 0) return false;
            throw TransportError("stream closed mid-message");
        }
        if (k < 0) throw TransportError("recv failed or timed out");
        got += static_cast<size_t>(k);
    }
    return true;
}

void TcpTransport::close() {
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_RDWR);
        ::close(fd_);
        fd_ = -1;
    }
}

void send_message_bytes(Transport& t, const std::vector<uint8_t>& encoded) {
    t.send(encoded);
}

bool recv_message_bytes(Transport& t, std::vector<uint8_t>& encoded) {
    uint8_t head[4];
    if (!t.recv_exact(head, 4)) return false;
    uint32_t len = (uint32_t(head[0]) << 24) | (uint32_t(head[1]) << 16) |
                   (uint32_t(head[2]) << 8) | uint32_t(head[3]);
    if (len < kHeaderAfterLength || len > kHeaderAfterLength + kMaxPayload)
        throw ProtocolError("bad message length on stream");
    encoded.resize(4 + len);
    std::memcpy(encoded.data(), head, 4);
    if (!t.recv_exact(encoded.data() + 4, len))
        throw TransportError("stream closed mid-message");
    return true;
}

std::pair<std::string, uint16_t> parse_endpoint(const std::string& hostport) {
    size_t colon = hostport.rfind(':');
    if (colon == std::string::npos)
        throw ConfigError("endpoint must be HOST:PORT, got " + hostport);
    std::string host = hostport.substr(0, colon);
    int port = std::stoi(hostport.substr(colon + 1));
    if (port <= 0 || port > 65535)
        throw ConfigError("bad port in endpoint: " + hostport);
    return {host, static_cast<uint16_t>(port)};
}

}  // namespace qkd::session
