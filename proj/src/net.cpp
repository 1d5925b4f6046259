#include "lutmpc/net.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace lutmpc {

namespace {

constexpr int kIoTimeoutMs = 120000;

u32 read_be32(const u8* p) {
  return (u32(p[0]) << 24) | (u32(p[1]) << 16) | (u32(p[2]) << 8) | u32(p[3]);
}

bool known_type(u8 t) {
  return t >= u8(MsgType::kOpen) && t <= u8(MsgType::kData);
}

}  // namespace

std::vector<u8> encode_frame(MsgType type, u16 session, const u8* payload,
                             std::size_t n) {
  if (n > kMaxPayload) throw FrameCorrupt("payload exceeds frame limit");
  std::vector<u8> wire(4 + 3 + n);
  const u32 len = u32(3 + n);
  wire[0] = u8(len >> 24);
  wire[1] = u8(len >> 16);
  wire[2] = u8(len >> 8);
  wire[3] = u8(len);
  wire[4] = u8(type);
  wire[5] = u8(session >> 8);
  wire[6] = u8(session);
  if (n) std::memcpy(wire.data() + 7, payload, n);
  return wire;
}

std::size_t decode_frame(const u8* data, std::size_t n, Frame& out) {
  if (n < 4) throw FrameCorrupt("truncated length prefix");
  const u32 len = read_be32(data);
  if (len < 3) throw FrameCorrupt("frame length below header size");
  if (len - 3 > kMaxPayload) throw FrameCorrupt("frame length exceeds limit");
  if (n < 4 + std::size_t(len)) throw FrameCorrupt("truncated frame body");
  if (!known_type(data[4])) throw FrameCorrupt("unknown message type");
  out.type = MsgType(data[4]);
  out.session = (u16(data[5]) << 8) | u16(data[6]);
  out.payload.assign(data + 7, data + 4 + len);
  return 4 + std::size_t(len);
}

// --- Chan ------------------------------------------------------------------

Frame Chan::exchange_wire(const std::vector<u8>& wire) {
  send_wire(wire);
  return recv_frame();
}

std::vector<u8> Chan::exchange(MsgType type, const u8* payload,
                               std::size_t n) {
  const std::vector<u8> wire = encode_frame(type, session_, payload, n);
  Frame peer = exchange_wire(wire);
  stats_.frames_sent += 1;
  stats_.payload_bytes += n;
  stats_.wire_bytes += 3 + n;
  stats_.rounds += 1;
  if (peer.session != session_)
    throw FrameCorrupt("peer frame from wrong session");
  if (peer.type != type) throw FrameCorrupt("peer frame type mismatch");
  if (sim_latency_ms_ > 0) {
    double sec = sim_latency_ms_ / 1e3;
    if (sim_mbit_ > 0)
      sec += double(2 * (7 + n)) * 8.0 / (sim_mbit_ * 1e6);
    std::this_thread::sleep_for(std::chrono::duration<double>(sec));
  }
  return std::move(peer.payload);
}

std::vector<u64> Chan::exchange_u64(MsgType type,
                                    const std::vector<u64>& vals) {
  std::vector<u8> buf(8 * vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i)
    for (int j = 0; j < 8; ++j) buf[8 * i + j] = u8(vals[i] >> (8 * j));
  std::vector<u8> peer = exchange(type, buf);
  if (peer.size() != buf.size())
    throw FrameCorrupt("peer ring-element count mismatch");
  std::vector<u64> out(vals.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    u64 v = 0;
    for (int j = 7; j >= 0; --j) v = (v << 8) | peer[8 * i + j];
    out[i] = v;
  }
  return out;
}

void Chan::send(MsgType type, const u8* payload, std::size_t n) {
  send_wire(encode_frame(type, session_, payload, n));
  stats_.frames_sent += 1;
  stats_.payload_bytes += n;
  stats_.wire_bytes += 3 + n;
}

Frame Chan::recv(MsgType expected_type) {
  Frame f = recv_frame();
  if (f.session != session_) throw FrameCorrupt("frame from wrong session");
  if (f.type != expected_type) throw FrameCorrupt("unexpected message type");
  return f;
}

void Chan::set_link_sim(double latency_ms, double mbit_per_s) {
  sim_latency_ms_ = latency_ms;
  sim_mbit_ = mbit_per_s;
}

// --- loopback --------------------------------------------------------------

struct LoopbackPair::Impl {
  struct Queue {
    std::deque<std::vector<u8>> frames;
  };
  std::mutex mu;
  std::condition_variable cv;
  Queue to[2];  // to[i]: frames awaiting endpoint i
  bool poisoned = false;

  class End : public Chan {
   public:
    End(Impl* impl, int party, u16 session)
        : Chan(session), impl_(impl), party_(party) {}

   protected:
    void send_wire(const std::vector<u8>& wire) override {
      std::lock_guard<std::mutex> lock(impl_->mu);
      impl_->to[1 - party_].frames.push_back(wire);
      impl_->cv.notify_all();
    }

    Frame recv_frame() override {
      std::unique_lock<std::mutex> lock(impl_->mu);
      auto& q = impl_->to[party_].frames;
      impl_->cv.wait(lock, [&] { return !q.empty() || impl_->poisoned; });
      if (q.empty() && impl_->poisoned)
        throw IoError("peer abandoned the session");
      std::vector<u8> wire = std::move(q.front());
      q.pop_front();
      lock.unlock();
      Frame f;
      std::size_t consumed = decode_frame(wire.data(), wire.size(), f);
      if (consumed != wire.size())
        throw FrameCorrupt("trailing bytes after frame");
      return f;
    }

   private:
    Impl* impl_;
    int party_;
  };

  End end0;
  End end1;

  explicit Impl(u16 session) : end0(this, 0, session), end1(this, 1, session) {}

  void poison() {
    std::lock_guard<std::mutex> lock(mu);
    poisoned = true;
    cv.notify_all();
  }
};

LoopbackPair::LoopbackPair(u16 session) : impl_(new Impl(session)) {}
LoopbackPair::~LoopbackPair() = default;

Chan& LoopbackPair::end(int party) {
  return party == 0 ? static_cast<Chan&>(impl_->end0)
                    : static_cast<Chan&>(impl_->end1);
}

void LoopbackPair::poison() { impl_->poison(); }

// --- TCP -------------------------------------------------------------------

namespace {

class TcpChan : public Chan {
 public:
  TcpChan(int fd, u16 session) : Chan(session), fd_(fd) {
    int one = 1;
    setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  }

  ~TcpChan() override {
    if (fd_ >= 0) close(fd_);
  }

 protected:
  void send_wire(const std::vector<u8>& wire) override {
    std::size_t sent = 0;
    while (sent < wire.size()) {
      wait_io(POLLOUT);
      ssize_t k = ::send(fd_, wire.data() + sent, wire.size() - sent,
                         MSG_NOSIGNAL);
      if (k < 0) {
        if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR)
          continue;
        throw IoError("send failed");
      }
      sent += std::size_t(k);
    }
  }

  Frame recv_frame() override {
    std::vector<u8> header = read_exact(4);
    const u32 len = read_be32(header.data());
    if (len < 3 || len - 3 > kMaxPayload)
      throw FrameCorrupt("frame length out of range");
    std::vector<u8> wire(4 + len);
    std::memcpy(wire.data(), header.data(), 4);
    read_into(wire.data() + 4, len);
    Frame f;
    decode_frame(wire.data(), wire.size(), f);
    return f;
  }

  // Interleaved full-duplex exchange: both parties can push large frames
  // at each other without deadlocking on full socket buffers.
  Frame exchange_wire(const std::vector<u8>& wire) override {
    std::size_t sent = 0;
    std::vector<u8> in;
    std::size_t need = 4;  // until the header is parsed
    bool have_header = false;
    while (sent < wire.size() || in.size() < need) {
      short want = 0;
      if (sent < wire.size()) want |= POLLOUT;
      if (in.size() < need) want |= POLLIN;
      short got = wait_io(want);
      if ((got & POLLOUT) && sent < wire.size()) {
        ssize_t k = ::send(fd_, wire.data() + sent, wire.size() - sent,
                           MSG_NOSIGNAL);
        if (k < 0 && errno != EAGAIN && errno != EWOULDBLOCK &&
            errno != EINTR)
          throw IoError("send failed");
        if (k > 0) sent += std::size_t(k);
      }
      if ((got & (POLLIN | POLLHUP)) && in.size() < need) {
        std::size_t old = in.size();
        in.resize(need);
        ssize_t k = ::recv(fd_, in.data() + old, need - old, 0);
        if (k == 0) throw IoError("peer closed connection");
        if (k < 0) {
          if (errno != EAGAIN && errno != EWOULDBLOCK && errno != EINTR)
            throw IoError("recv failed");
          k = 0;
        }
        in.resize(old + std::size_t(k));
        if (!have_header && in.size() >= 4) {
          const u32 len = read_be32(in.data());
          if (len < 3 || len - 3 > kMaxPayload)
            throw FrameCorrupt("frame length out of range");
          need = 4 + len;
          have_header = true;
        }
      }
    }
    Frame f;
    decode_frame(in.data(), in.size(), f);
    return f;
  }

 private:
  short wait_io(short events) {
    pollfd pfd{fd_, events, 0};
    int rc = ::poll(&pfd, 1, kIoTimeoutMs);
    if (rc == 0) throw IoError("peer timed out");
    if (rc < 0) throw IoError("poll failed");
    if (pfd.revents & POLLERR) throw IoError("socket error");
    return pfd.revents;
  }

  std::vector<u8> read_exact(std::size_t n) {
    std::vector<u8> buf(n);
    read_into(buf.data(), n);
    return buf;
  }

  void read_into(u8* dst, std::size_t n) {
    std::size_t got = 0;
    while (got < n) {
      wait_io(POLLIN);
      ssize_t k = ::recv(fd_, dst + got, n - got, 0);
      if (k == 0) throw IoError("peer closed connection");
      if (k < 0) {
        if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR)
          continue;
        throw IoError("recv failed");
      }
      got += std::size_t(k);
    }
  }

  int fd_;
};

void set_nonblocking(int fd) {
  // All IO is poll-driven; a non-blocking socket keeps a large mutual
  // exchange from wedging both parties inside a blocking send.
  int flags = fcntl(fd, F_GETFL, 0);
  if (flags >= 0) fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

}  // namespace

std::unique_ptr<Chan> tcp_listen_and_accept(u16 port, u16 session) {
  int lfd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (lfd < 0) throw IoError("socket creation failed");
  int one = 1;
  setsockopt(lfd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_ANY);
  addr.sin_port = htons(port);
  if (bind(lfd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
    close(lfd);
    throw IoError("bind failed");
  }
  if (listen(lfd, 1) < 0) {
    close(lfd);
    throw IoError("listen failed");
  }
  int fd = ::accept(lfd, nullptr, nullptr);
  close(lfd);
  if (fd < 0) throw IoError("accept failed");
  set_nonblocking(fd);
  return std::make_unique<TcpChan>(fd, session);
}

std::unique_ptr<Chan> tcp_connect(const std::string& host, u16 port,
                                  u16 session) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
    throw IoError("bad address: " + host);
  for (int attempt = 0; attempt < 100; ++attempt) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw IoError("socket creation failed");
    if (connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0) {
      set_nonblocking(fd);
      return std::make_unique<TcpChan>(fd, session);
    }
    close(fd);
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  throw IoError("could not connect to " + host);
}

void run_pair(const std::function<void(int, Chan&)>& body, u16 session) {
  LoopbackPair pair(session);
  std::exception_ptr errs[2] = {nullptr, nullptr};
  std::atomic<int> first_failer{-1};
  auto runner = [&](int party) {
    try {
      body(party, pair.end(party));
    } catch (...) {
      errs[party] = std::current_exception();
      int expected = -1;
      first_failer.compare_exchange_strong(expected, party);
      pair.poison();  // wake a peer blocked on recv
    }
  };
  std::thread t1([&] { runner(1); });
  runner(0);
  t1.join();
  // Rethrow the chronologically first failure: the second is usually just
  // the poisoned peer's IoError.
  int f = first_failer.load();
  if (f >= 0) std::rethrow_exception(errs[f]);
}

}  // namespace lutmpc
