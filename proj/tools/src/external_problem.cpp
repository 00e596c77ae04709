#include "external_problem.hpp"

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstring>

#include "ewhi/errors.hpp"
#include "numbers.hpp"

namespace ewhi::cli {

namespace {

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

bool write_all(int fd, const std::string& data) {
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    done += static_cast<std::size_t>(n);
  }
  return true;
}

std::string read_all(int fd) {
  std::string out;
  char buf[4096];
  while (true) {
    const ssize_t n = ::read(fd, buf, sizeof buf);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    out.append(buf, static_cast<std::size_t>(n));
  }
  return out;
}

// Returns the child's stdout; throws on spawn failure or nonzero exit.
std::string run_child(const std::string& command, const std::string& input) {
  int to_child[2], from_child[2];
  if (::pipe(to_child) != 0) throw EvaluationError(errno_text("pipe"));
  if (::pipe(from_child) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw EvaluationError(errno_text("pipe"));
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
    throw EvaluationError(errno_text("fork"));
  }
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);

  // A child that exits without reading stdin must not kill us with SIGPIPE.
  std::signal(SIGPIPE, SIG_IGN);
  const bool wrote = write_all(to_child[1], input);
  ::close(to_child[1]);
  std::string output = read_all(from_child[0]);
  ::close(from_child[0]);

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) throw EvaluationError(errno_text("waitpid"));
  }
  if (WIFSIGNALED(status)) throw EvaluationError("command killed by signal " + std::to_string(WTERMSIG(status)));
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw EvaluationError("command exited with status " + std::to_string(WEXITSTATUS(status)));
  }
  if (!wrote) throw EvaluationError("command did not read its input");
  return output;
}

}  // namespace

Problem external_problem(const std::string& command, const std::vector<double>& lower,
                         const std::vector<double>& upper, std::size_t num_objectives, std::size_t num_constraints) {
  if (lower.size() != upper.size() || lower.empty()) throw std::invalid_argument("bad bounds for external problem");
  Problem p;
  p.name = "external";
  p.dimension = lower.size();
  p.lower = Eigen::Map<const Eigen::VectorXd>(lower.data(), static_cast<Eigen::Index>(lower.size()));
  p.upper = Eigen::Map<const Eigen::VectorXd>(upper.data(), static_cast<Eigen::Index>(upper.size()));
  p.num_objectives = num_objectives;
  p.num_constraints = num_constraints;
  p.evaluate = [command, num_objectives, num_constraints](const Eigen::VectorXd& x) {
    std::string line;
    for (Eigen::Index i = 0; i < x.size(); ++i) line += (i ? " " : "") + format_number(x[i]);
    line += '\n';
    const std::string output = run_child(command, line);

    const auto newline = output.find('\n');
    const std::string first = output.substr(0, newline);
    std::vector<double> values;
    for (const auto& field : split_whitespace(first)) {
      const auto v = parse_number(field);
      if (!v) throw EvaluationError("malformed output field '" + field + "'");
      values.push_back(*v);
    }
    if (values.size() != num_objectives + num_constraints) {
      throw EvaluationError("expected " + std::to_string(num_objectives + num_constraints) + " values, got " +
                            std::to_string(values.size()));
    }
    Evaluation e;
    e.objectives.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(num_objectives));
    e.constraints.assign(values.begin() + static_cast<std::ptrdiff_t>(num_objectives), values.end());
    return e;
  };
  return p;
}

}  // namespace ewhi::cli
