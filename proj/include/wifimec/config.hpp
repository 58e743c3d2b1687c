#pragma once

#include "wifimec/experiment.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wifimec {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Physical dimension of a configuration value. A bare number is taken in
/// SI base units; a suffix must belong to the expected dimension.
enum class Quantity { dimensionless, frequency, power, bits, cycles, time, length, decibel, power_density };

/// "10GHz", "500 mW", "4Mbit", "900Megacycles", "-174dBm/Hz", "13.6us".
double parse_quantity(std::string_view text, Quantity q);
/// "[a, b, c]" or a single unbracketed item.
std::vector<std::string> parse_list(std::string_view text);
bool parse_bool(std::string_view text);

/// INI document with sections [scenario], [channel], [dtd3], [dqn] and
/// [sweep]. Every key is optional; unknown sections or keys are errors.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace wifimec
