#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace slowlab {

inline constexpr const char* kVersion = "0.1.0";

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> threads;
};

// Parses the JSON config text, executes the named command (cov, relcov,
// profile, ks, rigidity, mixing, validate) and writes CSV/metadata files
// into the output directory. Throws Error on failure; config problems
// carry Errc::schema.
void run_experiment(const std::string& config_text, const std::string& command,
                    const RunOverrides& overrides);

} // namespace slowlab
