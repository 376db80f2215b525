#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace txn::cli {

enum ExitCode { kOk = 0, kUsage = 2, kNumeric = 3, kIo = 4 };

/// Runs the command line `args` (without the program name). Data files go to
/// the output directory; summaries to `out`, diagnostics to `err`.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace txn::cli
