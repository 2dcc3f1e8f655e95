#include "xprov/external.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <thread>

#include "xprov/container_io.hpp"
#include "xprov/error.hpp"

namespace xprov {
namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;

  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "xprov-op-XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (!mkdtemp(buf.data())) {
      fail(ErrorCode::ExecutionFailure,
           std::string("mkdtemp: ") + std::strerror(errno));
    }
    path = buf.data();
  }

  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string read_head(const fs::path& p, std::size_t limit = 300) {
  std::ifstream in(p);
  if (!in) return {};
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (text.size() > limit) text.resize(limit);
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) {
    text.pop_back();
  }
  return text;
}

}  // namespace

Container run_external(const ExternalOpSpec& spec,
                       const std::vector<Container>& inputs) {
  if (spec.argv.empty()) {
    fail(ErrorCode::Precondition, "external op: empty command");
  }
  TempDir dir;

  std::vector<std::string> args = spec.argv;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    fs::path in_path = dir.path / ("in" + std::to_string(i) + ".json");
    save_container_file(inputs[i], in_path.string());
    args.push_back(in_path.string());
  }
  fs::path out_path = dir.path / "out.json";
  args.push_back(out_path.string());
  fs::path err_path = dir.path / "stderr";

  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  pid_t pid = fork();
  if (pid < 0) {
    fail(ErrorCode::ExecutionFailure,
         std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    int devnull = open("/dev/null", O_RDONLY);
    if (devnull >= 0) dup2(devnull, STDIN_FILENO);
    int errfd = open(err_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
    if (errfd >= 0) {
      dup2(errfd, STDOUT_FILENO);
      dup2(errfd, STDERR_FILENO);
    }
    execvp(argv[0], argv.data());
    _exit(127);
  }

  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::milliseconds(spec.timeout_ms);
  int status = 0;
  while (true) {
    pid_t done = waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    if (done < 0) {
      fail(ErrorCode::ExecutionFailure,
           std::string("waitpid: ") + std::strerror(errno));
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      fail(ErrorCode::Timeout, spec.argv[0] + ": killed after " +
                                   std::to_string(spec.timeout_ms) + "ms");
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }

  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    std::string detail = read_head(err_path);
    std::string msg = spec.argv[0] + ": exit status " +
                      (WIFEXITED(status)
                           ? std::to_string(WEXITSTATUS(status))
                           : "signal " + std::to_string(WTERMSIG(status)));
    if (!detail.empty()) msg += ": " + detail;
    fail(ErrorCode::NonZeroExit, msg);
  }

  if (!fs::exists(out_path)) {
    fail(ErrorCode::MalformedOutput,
         spec.argv[0] + ": no output file produced");
  }
  Container parsed = [&] {
    try {
      return load_container_file(out_path.string());
    } catch (const Error& e) {
      fail(ErrorCode::MalformedOutput,
           spec.argv[0] + ": bad output: " + e.what());
    }
  }();
  std::vector<Dimension> dims = parsed.dims();
  std::vector<Scalar> cells = parsed.cells();
  return Container::create(spec.output_id, std::move(dims), std::move(cells));
}

RunFn external_runner(ExternalOpSpec spec) {
  return [spec = std::move(spec)](const std::vector<Container>& inputs) {
    return run_external(spec, inputs);
  };
}

}  // namespace xprov
