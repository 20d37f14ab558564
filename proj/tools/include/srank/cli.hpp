#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "srank/ingest.hpp"

namespace srank::cli {

// Dispatches one subcommand. Data goes to `out` (or files named by --out),
// diagnostics to `err`. Returns 0 on success, 1 on domain errors, 2 on
// usage errors. `network_override`, when set, replaces the live transport;
// tests use it to count network operations.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        std::shared_ptr<Transport> network_override = nullptr);

}  // namespace srank::cli
