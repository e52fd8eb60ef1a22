#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "selectkit/remote_backend.hpp"

namespace selectkit {

// Test seams for the command line. A null transport means real HTTP.
struct CliHooks {
  std::shared_ptr<Transport> transport;
};

// Subcommands: mine, score activation|coherence, erase, trace, report.
// Returns 0 on success, 1 on a usage error, 2 when the pipeline fails.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
            const CliHooks& hooks = {});

// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const CliHooks& hooks = {});

}  // namespace selectkit
