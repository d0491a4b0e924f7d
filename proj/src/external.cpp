#include "levelset/external.hpp"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <thread>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "levelset/error.hpp"

namespace lsq {

namespace {

// Requests in flight before responses are drained; keeps both pipes well
// below their buffer size.
constexpr std::size_t kBatchChunk = 128;

[[noreturn]] void protocol(const std::string& what) { throw Error(ErrorCode::Protocol, what); }

}  // namespace

SubprocessClassifier::SubprocessClassifier(std::vector<std::string> argv, std::size_t num_classes)
    : k_(num_classes) {
  if (argv.empty()) throw Error(ErrorCode::Config, "external classifier command is empty");
  if (k_ < 2) throw Error(ErrorCode::Config, "external classifier needs at least two classes");
  std::signal(SIGPIPE, SIG_IGN);

  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0) protocol("pipe() failed");
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    protocol("pipe() failed");
  }
  // Exec failure is reported through a close-on-exec pipe.
  int status_pipe[2];
  if (pipe2(status_pipe, O_CLOEXEC) != 0) protocol("pipe() failed");

  const pid_t pid = fork();
  if (pid < 0) protocol("fork() failed");
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(status_pipe[0]);
    std::vector<char*> args;
    for (auto& a : argv) args.push_back(a.data());
    args.push_back(nullptr);
    execvp(args[0], args.data());
    const int err = errno;
    (void)!write(status_pipe[1], &err, sizeof err);
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  close(status_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];

  int err = 0;
  const ssize_t n = read(status_pipe[0], &err, sizeof err);
  close(status_pipe[0]);
  if (n == static_cast<ssize_t>(sizeof err)) {
    waitpid(pid_, nullptr, 0);
    pid_ = -1;
    close(to_child_);
    close(from_child_);
    to_child_ = from_child_ = -1;
    protocol("cannot start '" + argv[0] + "': " + std::strerror(err));
  }
}

SubprocessClassifier::~SubprocessClassifier() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  if (pid_ <= 0) return;
  // The child should exit on EOF; give it a moment before forcing it.
  for (int i = 0; i < 100; ++i) {
    if (waitpid(pid_, nullptr, WNOHANG) == pid_) return;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  kill(pid_, SIGKILL);
  waitpid(pid_, nullptr, 0);
}

void SubprocessClassifier::write_all(const std::string& data) const {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = write(to_child_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      protocol("external classifier closed its input");
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string SubprocessClassifier::read_line() const {
  for (;;) {
    const auto pos = buffer_.find('\n');
    if (pos != std::string::npos) {
      std::string line = buffer_.substr(0, pos);
      buffer_.erase(0, pos + 1);
      return line;
    }
    char chunk[4096];
    const ssize_t n = read(from_child_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) protocol("external classifier ended its output before answering");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::size_t SubprocessClassifier::classify(PointView r, const SimplexVector& q) const {
  return classify_batch(r, std::span<const SimplexVector>(&q, 1)).front();
}

std::vector<std::size_t> SubprocessClassifier::classify_batch(PointView r, std::span<const SimplexVector> qs) const {
  std::lock_guard lock(mutex_);
  const nlohmann::json jr = std::vector<double>(r.begin(), r.end());
  std::vector<std::size_t> out;
  out.reserve(qs.size());
  for (std::size_t begin = 0; begin < qs.size(); begin += kBatchChunk) {
    const std::size_t end = std::min(qs.size(), begin + kBatchChunk);
    std::string req;
    for (std::size_t i = begin; i < end; ++i) {
      if (qs[i].size() != k_) throw Error(ErrorCode::DimensionMismatch, "q length differs from class count");
      const auto w = qs[i].weights();
      nlohmann::json msg = {{"r", jr}, {"q", std::vector<double>(w.begin(), w.end())}};
      req += msg.dump();
      req += '\n';
    }
    write_all(req);
    for (std::size_t i = begin; i < end; ++i) {
      const std::string line = read_line();
      nlohmann::json resp;
      try {
        resp = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception&) {
        protocol("malformed response line: " + line);
      }
      if (!resp.is_object() || !resp.contains("label") || !resp["label"].is_number_integer()) {
        protocol("response lacks an integer \"label\": " + line);
      }
      const auto label = resp["label"].get<long long>();
      if (label < 1 || label > static_cast<long long>(k_)) protocol("label out of range: " + line);
      out.push_back(static_cast<std::size_t>(label - 1));
    }
  }
  return out;
}

}  // namespace lsq
