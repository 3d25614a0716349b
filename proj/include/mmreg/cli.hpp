#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mmreg {

/// Entry point shared by the binary and the tests. Exit codes: 0 success,
/// 1 usage error, 2 data error (parse/rank/singularity), 3 non-convergence
/// under --strict.
int cli_run(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace mmreg
