#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bqrec::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitInvalid = 1,    ///< malformed input, missing files, violated preconditions
    kExitNonUnique = 2,  ///< the system does not determine the unknowns uniquely
};

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "BQREC_OUT_DIR";

/// Entry point shared by the executable and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bqrec::cli
