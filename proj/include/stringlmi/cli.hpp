#pragma once

// Subcommands behind the `stringlmi` executable. Kept in the library so the
// dispatch can be exercised in-process.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "stringlmi/config.hpp"
#include "stringlmi/sdp.hpp"

namespace stringlmi::cli {

enum ExitCode : int {
  kOk = 0,
  kNotCertified = 2,
  kConfigError = 3,
  kNumericFailure = 4,
};

struct CommandLine {
  std::string command;  ///< check | cmin | chart | simulate | verify | export
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;          ///< overrides the config's "out"
  std::optional<std::filesystem::path> certificate;  ///< verify input; default <out>/certificate.json
};

/// Runs one subcommand, printing a one-line summary to `out` and errors as
/// "error [module.kind]: message" to `err`. Never throws.
int run(const CommandLine& cmd, std::ostream& out, std::ostream& err);

std::string certificate_to_json(const Certificate& cert, const VerificationReport& check,
                                const SystemDescription& sys);
/// Throws ConfigError on malformed input.
Certificate certificate_from_json(const std::string& text);

const char* tool_version() noexcept;

}  // namespace stringlmi::cli
