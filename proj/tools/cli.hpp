#pragma once

#include "oi/error.hpp"

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace oi::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

// Process exit statuses, one per error class.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,
    kExitParse = 3,      // ParseError, RaggedRows, BadMagic
    kExitDimension = 4,  // DimensionMismatch
    kExitSchema = 5,     // SchemaVersionMismatch
    kExitRange = 6,      // RangeError, BadSpec, InvalidValue
    kExitIo = 7,         // IoError
    kExitNumeric = 8,    // AllZeroNorms, ZeroVariance, EmptyInput, NotNormalized, EmptyPool
};

int exit_code_for(ErrorCode code) noexcept;

/// Runs one command line (args excludes the program name). Reports go to
/// files named by the flags; diagnostics go to err, short summaries to out.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

}  // namespace oi::cli
