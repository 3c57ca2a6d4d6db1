#include "decam/bridge.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <bit>
#include <cerrno>
#include <cstring>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "decam/error.hpp"

namespace decam {
namespace {

using Clock = std::chrono::steady_clock;

[[noreturn]] void unavailable(const std::string& what) {
  throw Error(ErrorKind::kScorerUnavailable, "bridge: " + what);
}

void append_floats(std::string& out, std::span<const float> values) {
  const std::size_t offset = out.size();
  out.resize(offset + values.size() * sizeof(float));
  char* dst = out.data() + offset;
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(dst, values.data(), values.size() * sizeof(float));
  } else {
    for (float v : values) {
      auto bits = std::bit_cast<std::uint32_t>(v);
      for (int b = 0; b < 4; ++b) *dst++ = static_cast<char>((bits >> (8 * b)) & 0xff);
    }
  }
}

std::vector<double> decode_floats(const std::string& bytes) {
  std::vector<double> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) {
      bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i * 4 + b])) << (8 * b);
    }
    out[i] = std::bit_cast<float>(bits);
  }
  return out;
}

}  // namespace

struct BridgeScorer::Process {
  pid_t pid = -1;
  int to_child = -1;
  int from_child = -1;
  bool broken = false;
  std::string pending;  // bytes read past the last consumed line/payload
  std::mutex mu;

  ~Process() {
    if (to_child >= 0) ::close(to_child);
    if (pid > 0) {
      // Closing stdin asks the bridge to exit; give it a moment before killing.
      const auto deadline = Clock::now() + std::chrono::seconds(2);
      int status = 0;
      while (::waitpid(pid, &status, WNOHANG) == 0) {
        if (Clock::now() > deadline) {
          ::kill(-pid, SIGKILL);
          ::waitpid(pid, &status, 0);
          break;
        }
        ::usleep(2000);
      }
      // The shell may have forked the real bridge; take down anything left in its group.
      ::kill(-pid, SIGKILL);
    }
    if (from_child >= 0) ::close(from_child);
  }

  int remaining_ms(Clock::time_point deadline) const {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    return left.count() > 0 ? static_cast<int>(left.count()) : 0;
  }

  void wait_fd(int fd, short events, Clock::time_point deadline) {
    pollfd p{fd, events, 0};
    for (;;) {
      const int rc = ::poll(&p, 1, remaining_ms(deadline));
      if (rc > 0) return;
      if (rc == 0) unavailable("timed out waiting for the bridge process");
      if (errno != EINTR) unavailable(std::string("poll failed: ") + std::strerror(errno));
    }
  }

  void write_all(const std::string& bytes, Clock::time_point deadline) {
    std::size_t done = 0;
    while (done < bytes.size()) {
      const ssize_t n = ::write(to_child, bytes.data() + done, bytes.size() - done);
      if (n > 0) {
        done += static_cast<std::size_t>(n);
      } else if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
        wait_fd(to_child, POLLOUT, deadline);
      } else if (n < 0 && errno == EINTR) {
        continue;
      } else {
        unavailable(std::string("write to bridge failed: ") + std::strerror(errno));
      }
    }
  }

  void fill(Clock::time_point deadline) {
    char buf[65536];
    for (;;) {
      const ssize_t n = ::read(from_child, buf, sizeof(buf));
      if (n > 0) {
        pending.append(buf, static_cast<std::size_t>(n));
        return;
      }
      if (n == 0) unavailable("bridge process closed its output");
      if (errno == EAGAIN || errno == EWOULDBLOCK) {
        wait_fd(from_child, POLLIN, deadline);
      } else if (errno != EINTR) {
        unavailable(std::string("read from bridge failed: ") + std::strerror(errno));
      }
    }
  }

  std::string read_line(Clock::time_point deadline) {
    for (;;) {
      if (auto nl = pending.find('\n'); nl != std::string::npos) {
        std::string line = pending.substr(0, nl);
        pending.erase(0, nl + 1);
        return line;
      }
      if (pending.size() > 4096) unavailable("protocol line too long");
      fill(deadline);
    }
  }

  std::string read_exact(std::size_t n, Clock::time_point deadline) {
    while (pending.size() < n) fill(deadline);
    std::string out = pending.substr(0, n);
    pending.erase(0, n);
    return out;
  }
};

BridgeScorer::BridgeScorer(BridgeOptions options) : options_(std::move(options)) {
  if (options_.command.empty()) unavailable("empty bridge command");
  // A dead bridge must surface as an error from write(), not kill the engine.
  ::signal(SIGPIPE, SIG_IGN);

  int in_pipe[2], out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) unavailable("pipe failed");
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    unavailable("pipe failed");
  }
  const pid_t pid = ::fork();
  if (pid < 0) unavailable("fork failed");
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", options_.command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);  // also done in the child; whichever runs first wins
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  proc_ = std::make_unique<Process>();
  proc_->pid = pid;
  proc_->to_child = in_pipe[1];
  proc_->from_child = out_pipe[0];
  ::fcntl(proc_->to_child, F_SETFL, ::fcntl(proc_->to_child, F_GETFL) | O_NONBLOCK);
  ::fcntl(proc_->from_child, F_SETFL, ::fcntl(proc_->from_child, F_GETFL) | O_NONBLOCK);

  const auto deadline = Clock::now() + options_.timeout;
  proc_->write_all("HELLO DECAM 1\n", deadline);
  const std::string line = proc_->read_line(deadline);
  if (line.rfind("ERR ", 0) == 0) unavailable("handshake rejected: " + line.substr(4));
  std::istringstream in(line);
  std::string tag, extra;
  long h = 0, w = 0, c = 0, classes = 0;
  if (!(in >> tag >> h >> w >> c >> classes) || tag != "OK" || (in >> extra) || h <= 0 || w <= 0 ||
      (c != 1 && c != 3) || classes <= 0) {
    unavailable("bad handshake reply '" + line + "'");
  }
  shape_ = {static_cast<int>(h), static_cast<int>(w), static_cast<int>(c)};
  num_classes_ = static_cast<std::size_t>(classes);
}

BridgeScorer::~BridgeScorer() = default;

std::string BridgeScorer::identity() const { return "bridge:" + options_.command; }
std::optional<ImageShape> BridgeScorer::expected_shape() const { return shape_; }
std::optional<std::size_t> BridgeScorer::num_classes() const { return num_classes_; }

std::vector<double> BridgeScorer::exchange(const std::string& header, std::span<const Image> batch,
                                           std::size_t expected) {
  Process& proc = *proc_;
  std::lock_guard lock(proc.mu);
  if (proc.broken) unavailable("bridge stream is unusable after an earlier failure");
  try {
    const auto deadline = Clock::now() + options_.timeout;
    std::string msg = header;
    msg.reserve(header.size() + batch.size() * batch.front().shape().values() * sizeof(float));
    for (const auto& img : batch) append_floats(msg, img.data());
    proc.write_all(msg, deadline);

    const std::string line = proc.read_line(deadline);
    if (line.rfind("ERR ", 0) == 0) unavailable("model error: " + line.substr(4));
    std::istringstream in(line);
    std::string tag, extra;
    std::size_t count = 0;
    if (!(in >> tag >> count) || tag != "LOGITS" || (in >> extra)) {
      unavailable("unexpected reply '" + line + "'");
    }
    if (count != expected) {
      unavailable("reply carries " + std::to_string(count) + " values, expected " +
                  std::to_string(expected));
    }
    return decode_floats(proc.read_exact(count * sizeof(float), deadline));
  } catch (...) {
    proc.broken = true;
    throw;
  }
}

std::vector<double> BridgeScorer::do_score(std::span<const Image> batch, std::size_t class_index) {
  const std::string header =
      "SCORE " + std::to_string(batch.size()) + " " + std::to_string(class_index) + "\n";
  return exchange(header, batch, batch.size());
}

std::vector<double> BridgeScorer::do_score_all(std::span<const Image> batch) {
  const std::string header = "LOGITS_ALL " + std::to_string(batch.size()) + "\n";
  return exchange(header, batch, batch.size() * num_classes_);
}

}  // namespace decam
