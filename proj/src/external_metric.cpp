#include "tiqa/external_metric.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <regex>
#include <thread>

extern char** environ;

namespace tiqa {

namespace {

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    reset();
    fd_ = std::exchange(o.fd_, -1);
    return *this;
  }
  ~Fd() { reset(); }
  int get() const noexcept { return fd_; }
  void reset() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_{-1};
};

std::pair<Fd, Fd> make_pipe() {
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) {
    throw PluginError(std::string("pipe failed: ") + std::strerror(errno), "", false);
  }
  return {Fd(fds[0]), Fd(fds[1])};
}

}  // namespace

bool is_valid_plugin_output(std::string_view text) {
  static const std::regex pattern(R"(^-?[0-9]+(\.[0-9]+)?([eE][+-]?[0-9]+)?\s*$)");
  return std::regex_match(text.begin(), text.end(), pattern);
}

double run_plugin_process(const std::filesystem::path& cmd,
                          const std::filesystem::path& ref_path,
                          const std::filesystem::path& dist_path,
                          std::chrono::milliseconds timeout) {
  auto [out_read, out_write] = make_pipe();
  auto [err_read, err_write] = make_pipe();

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, out_write.get(), STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(&actions, err_write.get(), STDERR_FILENO);
  posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);

  const std::string cmd_s = cmd.string();
  const std::string ref_s = ref_path.string();
  const std::string dist_s = dist_path.string();
  std::array<char*, 4> argv{const_cast<char*>(cmd_s.c_str()),
                            const_cast<char*>(ref_s.c_str()),
                            const_cast<char*>(dist_s.c_str()), nullptr};
  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);
  pid_t pid = 0;
  const int rc = ::posix_spawnp(&pid, cmd_s.c_str(), &actions, &attr,
                                argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  posix_spawnattr_destroy(&attr);
  out_write.reset();
  err_write.reset();
  if (rc != 0) {
    throw PluginError("cannot start plugin '" + cmd_s + "': " + std::strerror(rc),
                      "", false);
  }

  std::string out_text;
  std::string err_text;
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  bool timed_out = false;
  std::array<pollfd, 2> fds{pollfd{out_read.get(), POLLIN, 0},
                            pollfd{err_read.get(), POLLIN, 0}};
  int open_streams = 2;
  while (open_streams > 0) {
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      timed_out = true;
      break;
    }
    const int ready = ::poll(fds.data(), fds.size(), static_cast<int>(remaining.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      break;
    }
    for (std::size_t i = 0; i < fds.size(); ++i) {
      if (fds[i].fd < 0 || fds[i].revents == 0) continue;
      char buf[4096];
      const ssize_t n = ::read(fds[i].fd, buf, sizeof buf);
      if (n > 0) {
        (i == 0 ? out_text : err_text).append(buf, static_cast<std::size_t>(n));
      } else if (n == 0 || errno != EINTR) {
        fds[i].fd = -1;
        --open_streams;
      }
    }
  }

  // Reap the child under the same deadline.
  int status = 0;
  bool reaped = false;
  while (!timed_out) {
    const pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid || (r < 0 && errno != EINTR)) {
      reaped = r == pid;
      break;
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      timed_out = true;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  if (timed_out) {
    ::kill(-pid, SIGKILL);
    ::kill(pid, SIGKILL);
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    throw PluginError("plugin '" + cmd_s + "' timed out after " +
                          std::to_string(timeout.count()) + " ms",
                      err_text, true);
  }
  if (!reaped || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    const std::string how = !reaped ? "could not be waited for"
                            : WIFEXITED(status)
                                ? "exited with status " + std::to_string(WEXITSTATUS(status))
                                : "terminated by a signal";
    std::string message = "plugin '" + cmd_s + "' " + how;
    if (!err_text.empty()) message += ": " + err_text.substr(0, 400);
    while (!message.empty() && std::isspace(static_cast<unsigned char>(message.back()))) {
      message.pop_back();
    }
    throw PluginError(message, err_text, false);
  }
  if (!is_valid_plugin_output(out_text)) {
    throw PluginError("plugin '" + cmd_s + "' printed unparsable output '" +
                          out_text + "'",
                      err_text, false);
  }
  const double value = std::strtod(out_text.c_str(), nullptr);
  if (!std::isfinite(value)) {
    throw PluginError("plugin '" + cmd_s + "' printed a non-finite value", err_text,
                      false);
  }
  return value;
}

PluginRegistry::PluginRegistry(const PluginRegistry& other) : specs_(other.specs_) {
  for (const auto& [name, spec] : specs_) {
    locks_.emplace(name, std::make_unique<std::mutex>());
  }
}

PluginRegistry& PluginRegistry::operator=(const PluginRegistry& other) {
  if (this != &other) *this = PluginRegistry(other);
  return *this;
}

void PluginRegistry::add(const std::string& name, PluginSpec spec) {
  const MetricId id = MetricId::external(name);  // validates the token
  if (spec.cmd.empty()) {
    throw Error(ErrorKind::config, "plugin '" + name + "' has no command");
  }
  specs_[id.name()] = std::move(spec);
  if (!locks_.contains(id.name())) {
    locks_.emplace(id.name(), std::make_unique<std::mutex>());
  }
}

bool PluginRegistry::contains(const std::string& name) const {
  return specs_.contains(name);
}

const PluginSpec& PluginRegistry::at(const std::string& name) const {
  const auto it = specs_.find(name);
  if (it == specs_.end()) {
    throw Error(ErrorKind::plugin, "no plugin registered for metric '" + name + "'");
  }
  return it->second;
}

std::vector<std::string> PluginRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, spec] : specs_) out.push_back(name);
  return out;
}

MetricScore PluginRegistry::run(const std::string& name,
                                const std::filesystem::path& ref_path,
                                const std::filesystem::path& dist_path) const {
  return run(name, ref_path, dist_path, at(name).timeout);
}

MetricScore PluginRegistry::run(const std::string& name,
                                const std::filesystem::path& ref_path,
                                const std::filesystem::path& dist_path,
                                std::chrono::milliseconds timeout) const {
  const PluginSpec& spec = at(name);
  std::lock_guard lock(*locks_.at(name));
  return {MetricId::external(name),
          run_plugin_process(spec.cmd, ref_path, dist_path, timeout)};
}

MetricScore run_external(const PluginRegistry& registry, const std::string& name,
                         const std::filesystem::path& ref_path,
                         const std::filesystem::path& dist_path,
                         std::chrono::milliseconds timeout) {
  return registry.run(name, ref_path, dist_path, timeout);
}

MetricDescriptor describe(const MetricId& id, const PluginRegistry* registry) {
  if (!id.is_external()) return builtin_descriptor(id);
  if (registry == nullptr || !registry->contains(id.name())) {
    throw Error(ErrorKind::plugin,
                "no plugin registered for metric '" + id.name() + "'");
  }
  return {id, registry->at(id.name()).polarity, std::nullopt};
}

}  // namespace tiqa
