#pragma once

namespace basisid::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kParse = 3,
  kDivergence = 4,
  kRankDeficiency = 5,
  kInvalidInput = 6,
};

int run(int argc, char** argv);

}  // namespace basisid::cli
