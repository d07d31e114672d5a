#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace autotag::cli {

enum ExitCode : int
{
    kOk = 0,
    kUsage = 1,
    kDataError = 2,
};

/// `args` excludes the program name. Machine output goes to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace autotag::cli
