#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <json.hpp>
#include <thread>

#include "mfnas/errors.hpp"
#include "mfnas/evaluators.hpp"

namespace mfnas {
namespace {

using Clock = std::chrono::steady_clock;

void write_all(int fd, const std::string& data) {
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw EvaluatorDied(std::string("evaluator stdin closed: ") + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
}

}  // namespace

ExternalEvaluator::ExternalEvaluator(const std::string& command, std::chrono::milliseconds timeout,
                                     SpaceSpec space)
    : space_(std::move(space)), timeout_(timeout) {
  space_.validate();
  // A dead child must surface as EPIPE, not kill the engine.
  ::signal(SIGPIPE, SIG_IGN);

  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw EvaluatorError("pipe failed");
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw EvaluatorError("pipe failed");
  }
  pid_ = ::fork();
  if (pid_ < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    throw EvaluatorError("fork failed");
  }
  if (pid_ == 0) {
    // own process group, so a kill reaches whatever the shell started
    ::setpgid(0, 0);
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid_, pid_);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];

  std::string line;
  try {
    line = read_line();
  } catch (...) {
    shutdown();
    throw;
  }
  nlohmann::json hello;
  try {
    hello = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    shutdown();
    throw ProtocolError("handshake is not JSON: " + line);
  }
  if (!hello.is_object() || hello.value("protocol", std::string{}) != kEvalProtocol) {
    shutdown();
    throw ProtocolError("unexpected handshake: " + line);
  }
}

ExternalEvaluator::~ExternalEvaluator() { shutdown(); }

void ExternalEvaluator::shutdown() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ <= 0) return;
  // Closing stdin asks the child to exit; give it a moment before killing it.
  for (int i = 0; i < 50; ++i) {
    if (::waitpid(pid_, nullptr, WNOHANG) == pid_) {
      pid_ = -1;
      return;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  ::kill(-pid_, SIGKILL);
  ::waitpid(pid_, nullptr, 0);
  pid_ = -1;
}

void ExternalEvaluator::fail_died(const std::string& what) {
  shutdown();
  throw EvaluatorDied(what);
}

std::string ExternalEvaluator::read_line() {
  if (from_child_ < 0) throw EvaluatorDied("evaluator is not running");
  const auto deadline = Clock::now() + timeout_;
  for (;;) {
    if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (left.count() <= 0) throw EvaluatorTimeout("no response from evaluator within timeout");
    pollfd pfd{from_child_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(left.count(), 1 << 30)));
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw EvaluatorError(std::string("poll failed: ") + std::strerror(errno));
    }
    if (rc == 0) continue;
    char chunk[4096];
    const ssize_t n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail_died(std::string("read from evaluator failed: ") + std::strerror(errno));
    }
    if (n == 0) fail_died("evaluator exited");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

double ExternalEvaluator::accuracy(const Genotype& g) {
  space_.check(g);
  if (to_child_ < 0) throw EvaluatorDied("evaluator is not running");
  const long long id = next_id_++;
  nlohmann::ordered_json request;
  request["id"] = id;
  request["genotype"] = nlohmann::json::array();
  request["kernels"] = nlohmann::json::array();
  for (std::size_t i = 0; i < g.size(); ++i) {
    request["genotype"].push_back(g[i]);
    request["kernels"].push_back(space_.choices[g[i]].kernel);
  }
  try {
    write_all(to_child_, request.dump() + "\n");
  } catch (const EvaluatorDied& e) {
    fail_died(e.what());
  }

  const std::string line = read_line();
  nlohmann::json response;
  try {
    response = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw ProtocolError("malformed response: " + line);
  }
  if (!response.is_object() || !response.contains("id") || !response["id"].is_number_integer())
    throw ProtocolError("response without integer id: " + line);
  if (response["id"].get<long long>() != id)
    throw ProtocolError("response id " + response["id"].dump() + " does not match request id " + std::to_string(id));
  if (response.contains("error"))
    throw EvaluatorError("evaluator reported error for request " + std::to_string(id) + ": " +
                         response["error"].dump());
  if (!response.contains("accuracy") || !response["accuracy"].is_number())
    throw ProtocolError("response without numeric accuracy: " + line);
  const double acc = response["accuracy"].get<double>();
  if (!(acc >= 0.0 && acc <= 1.0)) throw ProtocolError("accuracy outside [0, 1]: " + line);
  return acc;
}

}  // namespace mfnas
