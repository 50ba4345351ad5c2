#include <algorithm>
#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include "endian.hpp"
#include "patchseg/scorer.hpp"
#include "patchseg/wire.hpp"

extern char** environ;

namespace patchseg {

namespace {

using Clock = std::chrono::steady_clock;

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { std::signal(SIGPIPE, SIG_IGN); });
}

void set_nonblocking(int fd) {
  const int flags = ::fcntl(fd, F_GETFL);
  ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

std::string describe_exit(int pid) {
  int status = 0;
  const int r = ::waitpid(pid, &status, WNOHANG);
  if (r != pid) return "scorer process closed its output";
  if (WIFEXITED(status)) return "scorer exited with code " + std::to_string(WEXITSTATUS(status));
  if (WIFSIGNALED(status)) return "scorer killed by signal " + std::to_string(WTERMSIG(status));
  return "scorer process ended";
}

}  // namespace

ExternalScorer::ExternalScorer(ExternalScorerOptions options) : options_(std::move(options)) {
  if (options_.command.empty()) throw Error(ErrorCode::InvalidArgument, "empty scorer command");
  if (options_.timeout.count() <= 0) throw Error(ErrorCode::InvalidArgument, "timeout must be positive");
  spawn();
}

ExternalScorer::~ExternalScorer() { shutdown(false); }

void ExternalScorer::spawn() {
  ignore_sigpipe();
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw Error(ErrorCode::ScorerCrashed, "pipe failed");
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw Error(ErrorCode::ScorerCrashed, "pipe failed");
  }

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);

  const std::string script = "exec " + options_.command;
  std::vector<char*> argv = {const_cast<char*>("/bin/sh"), const_cast<char*>("-c"),
                             const_cast<char*>(script.c_str()), nullptr};
  pid_t pid = -1;
  const int rc = ::posix_spawn(&pid, "/bin/sh", &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  if (rc != 0) {
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    throw Error(ErrorCode::ScorerCrashed, "cannot launch scorer: " + std::string(std::strerror(rc)));
  }
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  set_nonblocking(to_child_);
  set_nonblocking(from_child_);
}

void ExternalScorer::shutdown(bool force) {
  if (to_child_ >= 0) {
    ::close(to_child_);
    to_child_ = -1;
  }
  if (from_child_ >= 0) {
    ::close(from_child_);
    from_child_ = -1;
  }
  if (pid_ <= 0) return;
  if (!force) {
    // Closing stdin asks the peer to exit; give it a moment before killing.
    const auto deadline = Clock::now() + std::chrono::milliseconds(500);
    while (Clock::now() < deadline) {
      int status = 0;
      if (::waitpid(pid_, &status, WNOHANG) == pid_) {
        pid_ = -1;
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
  }
  ::kill(pid_, SIGKILL);
  int status = 0;
  ::waitpid(pid_, &status, 0);
  pid_ = -1;
}

void ExternalScorer::fail(ErrorCode code, const std::string& message) {
  broken_ = true;
  shutdown(true);
  throw Error(code, message);
}

ProbMap ExternalScorer::score(const PatchRequest& request) {
  if (broken_) throw Error(ErrorCode::ScorerCrashed, "scorer process is no longer usable");
  const Raster& px = request.pixels;

  wire::Request req;
  req.height = static_cast<std::uint32_t>(px.height());
  req.width = static_cast<std::uint32_t>(px.width());
  req.channels = static_cast<std::uint8_t>(px.channels());
  req.payload.assign(px.data().begin(), px.data().end());
  const std::vector<std::uint8_t> out = wire::encode(req);

  std::vector<std::uint8_t> in(wire::kResponseHeaderSize);
  std::size_t expected = wire::kResponseHeaderSize;
  bool header_done = false;
  std::size_t written = 0;
  std::size_t received = 0;
  const auto deadline = Clock::now() + options_.timeout;

  while (received < expected) {
    const auto remaining =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    if (remaining <= 0) {
      fail(ErrorCode::Timeout, "no complete response within " +
                                   std::to_string(options_.timeout.count()) + " ms");
    }
    pollfd fds[2];
    nfds_t nfds = 0;
    fds[nfds++] = {from_child_, POLLIN, 0};
    const bool writing = written < out.size();
    if (writing) fds[nfds++] = {to_child_, POLLOUT, 0};
    const int ready = ::poll(fds, nfds, static_cast<int>(std::min<long long>(remaining, 1000)));
    if (ready < 0) {
      if (errno == EINTR) continue;
      fail(ErrorCode::ScorerCrashed, "poll failed");
    }
    if (ready == 0) continue;

    if (writing && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      const ssize_t n = ::write(to_child_, out.data() + written, out.size() - written);
      if (n > 0) {
        written += static_cast<std::size_t>(n);
      } else if (n < 0 && errno != EAGAIN && errno != EINTR) {
        fail(ErrorCode::ScorerCrashed, describe_exit(pid_) + " (stdin closed)");
      }
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      const ssize_t n = ::read(from_child_, in.data() + received, expected - received);
      if (n == 0) {
        if (received == 0) fail(ErrorCode::ScorerCrashed, describe_exit(pid_));
        fail(ErrorCode::ProtocolError, "response truncated after " + std::to_string(received) +
                                           " of " + std::to_string(expected) + " bytes");
      }
      if (n < 0) {
        if (errno == EAGAIN || errno == EINTR) continue;
        fail(ErrorCode::ScorerCrashed, "read failed");
      }
      received += static_cast<std::size_t>(n);
      if (!header_done && received == wire::kResponseHeaderSize) {
        wire::ResponseHeader h;
        try {
          h = wire::parse_response_header(in);
        } catch (const Error& e) {
          fail(ErrorCode::ProtocolError, e.what());
        }
        if (h.height != req.height || h.width != req.width) {
          fail(ErrorCode::ProtocolError,
               "response is " + std::to_string(h.height) + "x" + std::to_string(h.width) +
                   " for a " + std::to_string(req.height) + "x" + std::to_string(req.width) +
                   " request");
        }
        header_done = true;
        expected += h.payload_bytes();
        in.resize(expected);
      }
    }
  }
  if (written < out.size()) {
    fail(ErrorCode::ProtocolError, "peer answered before reading the full request");
  }

  const std::size_t n = static_cast<std::size_t>(px.width()) * px.height();
  std::vector<float> probs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const float v = detail::get_f32(in, wire::kResponseHeaderSize + i * 4);
    if (!(v >= 0.0f && v <= 1.0f)) {
      fail(ErrorCode::ProbabilityOutOfRange,
           "value " + std::to_string(v) + " at pixel " + std::to_string(i));
    }
    probs[i] = v;
  }
  return ProbMap(px.width(), px.height(), std::move(probs));
}

}  // namespace patchseg
