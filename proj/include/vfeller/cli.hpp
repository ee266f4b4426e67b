#pragma once

#include <iosfwd>

namespace vfeller::cli {

/// Entry point of the command-line tool. Exit codes: 0 success with decisive
/// verdicts, 2 when a verdict is Inconclusive (or a crosscheck is inconsistent),
/// 1 on any error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vfeller::cli
