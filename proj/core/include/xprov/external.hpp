#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xprov/container.hpp"
#include "xprov/oracle.hpp"

namespace xprov {

// A black-box operation hosted in another process. The command is invoked
// as `argv... <input.json>... <output.json>`: every input container is
// serialized to a file, appended to the argument list, and the process is
// expected to write the output container to the final path.
struct ExternalOpSpec {
  std::vector<std::string> argv;
  // Id stamped onto the parsed output container.
  std::string output_id = "out";
  std::int64_t timeout_ms = 30000;
};

// Runs the process once. Errors: Timeout (process killed after
// timeout_ms), NonZeroExit (includes captured stderr), MalformedOutput
// (missing or unparsable output file), ExecutionFailure (could not spawn).
Container run_external(const ExternalOpSpec& spec,
                       const std::vector<Container>& inputs);

// Adapter for the influence oracle and the learner.
RunFn external_runner(ExternalOpSpec spec);

}  // namespace xprov
