#pragma once

#include <stdexcept>
#include <string>

namespace wra {

// Error taxonomy mirrors the CLI exit-code contract:
//   0 ok, 2 config/parse, 3 data, 4 math/domain, 5 experiment abort.

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

struct MathError : std::runtime_error {
    explicit MathError(const std::string& what) : std::runtime_error(what) {}
};

struct ExperimentError : std::runtime_error {
    explicit ExperimentError(const std::string& what) : std::runtime_error(what) {}
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 2;
inline constexpr int data = 3;
inline constexpr int math = 4;
inline constexpr int experiment = 5;
}  // namespace exit_code

}  // namespace wra
