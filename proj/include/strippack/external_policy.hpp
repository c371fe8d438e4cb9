#pragma once

// Policy backed by a child process (e.g. a trained network). The child is
// started with `/bin/sh -c <command>`, receives the protocol handshake line,
// then one observation line per decision (same format as the server's
// observation responses), and must answer each with {"action": <index>}.
// The child lives across episodes; after any failure it is killed and a fresh
// one is started on the next episode.

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <optional>
#include <stdexcept>
#include <string>

#include "policies.hpp"
#include "protocol.hpp"

namespace strippack {

class ChildProcess {
 public:
  explicit ChildProcess(const std::string& command) {
    // A child that dies must surface as a write error, not kill us.
    ::signal(SIGPIPE, SIG_IGN);
    // Close-on-exec so children started concurrently from other threads don't
    // inherit each other's pipe ends.
    int to_child[2];
    int from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0) throw std::runtime_error(std::string("pipe: ") + std::strerror(errno));
    if (::pipe2(from_child, O_CLOEXEC) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw std::runtime_error(std::string("pipe: ") + std::strerror(errno));
    }
    pid_ = ::fork();
    if (pid_ < 0) {
      for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
      throw std::runtime_error(std::string("fork: ") + std::strerror(errno));
    }
    if (pid_ == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    in_ = to_child[1];
    out_ = from_child[0];
  }

  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  ~ChildProcess() {
    if (in_ >= 0) ::close(in_);
    if (out_ >= 0) ::close(out_);
    if (pid_ > 0) {
      ::kill(pid_, SIGTERM);
      int status = 0;
      ::waitpid(pid_, &status, 0);
    }
  }

  void write_line(const std::string& line) {
    std::string buf = line + '\n';
    std::size_t off = 0;
    while (off < buf.size()) {
      const ssize_t n = ::write(in_, buf.data() + off, buf.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw std::runtime_error(std::string("external policy: write failed: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  std::string read_line(std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
      if (const auto nl = pending_.find('\n'); nl != std::string::npos) {
        std::string line = pending_.substr(0, nl);
        pending_.erase(0, nl + 1);
        return line;
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) throw std::runtime_error("external policy: timed out waiting for a reply");
      pollfd pfd{out_, POLLIN, 0};
      const int r = ::poll(&pfd, 1, static_cast<int>(left.count()));
      if (r < 0 && errno == EINTR) continue;
      if (r < 0) throw std::runtime_error(std::string("external policy: poll failed: ") + std::strerror(errno));
      if (r == 0) continue;
      char chunk[4096];
      const ssize_t n = ::read(out_, chunk, sizeof chunk);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) throw std::runtime_error("external policy: process closed its output");
      pending_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  pid_t pid_ = -1;
  int in_ = -1;
  int out_ = -1;
  std::string pending_;
};

class ExternalPolicy final : public EnvPolicy {
 public:
  explicit ExternalPolicy(std::string command, std::chrono::milliseconds timeout = std::chrono::seconds(30))
      : command_(std::move(command)), timeout_(timeout) {}

  std::string name() const override { return "external"; }

  void begin_episode(std::uint64_t) override {
    if (child_) return;
    if (command_.empty()) throw std::runtime_error("external policy: no command configured");
    child_.emplace(command_);
    handshake_pending_ = true;
  }

  std::optional<Action> act(const PackingEnv& env) override {
    if (!child_) throw std::runtime_error("external policy: process not running");
    try {
      if (handshake_pending_) {
        child_->write_line(protocol::handshake_line(env.config().bin));
        handshake_pending_ = false;
      }
      child_->write_line(protocol::observation_line(env, {}));
      const std::string reply = child_->read_line(timeout_);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(reply);
      } catch (const nlohmann::json::parse_error&) {
        throw std::runtime_error("external policy: malformed reply '" + reply + "'");
      }
      if (!j.is_object() || !j.contains("action") || !j["action"].is_number_integer()) {
        throw std::runtime_error("external policy: reply lacks integer 'action'");
      }
      return Action{j["action"].get<int>()};
    } catch (...) {
      child_.reset();
      throw;
    }
  }

 private:
  std::string command_;
  std::chrono::milliseconds timeout_;
  std::optional<ChildProcess> child_;
  bool handshake_pending_ = false;
};

}  // namespace strippack
