#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>

namespace wifimec {

/// Uplink channel constants. Defaults: thermal noise floor, 802.11ax 26-tone
/// bandwidth, log-distance indoor path loss at 5 GHz without wall terms.
struct ChannelParams {
  double noise_psd = 3.981071705534972e-21;  // -174 dBm/Hz in W/Hz
  double ru_unit_bandwidth = 26 * 78.125e3;  // Hz
  double carrier_frequency = 5e9;            // Hz
  double pathloss_exponent = 3.0;
  double pathloss_ref_db = 46.4;  // dB at 1 m

  void validate() const;
};

/// OFDMA resource unit size in multiples of a 26-tone RU.
enum class RuSize : int {
  k26 = 1,
  k52 = 2,
  k106 = 4,
  k242 = 9,
  k484 = 18,
  k996 = 36,
};

inline constexpr std::array<RuSize, 6> kRuSizes = {RuSize::k26,  RuSize::k52,  RuSize::k106,
                                                   RuSize::k242, RuSize::k484, RuSize::k996};

constexpr int units(RuSize ru) { return static_cast<int>(ru); }

/// Position of `ru` in kRuSizes (0..5).
int ru_index(RuSize ru);

/// Throws std::invalid_argument unless `units` is one of {1,2,4,9,18,36}.
RuSize ru_from_units(int units);

struct McsIndex {
  int index = 0;

  static constexpr int kCount = 12;

  constexpr explicit McsIndex(int i) : index(i) {
    if (i < 0 || i >= kCount) throw std::out_of_range("MCS index must be in [0, 11]");
  }
  friend constexpr bool operator==(McsIndex, McsIndex) = default;
  friend constexpr auto operator<=>(McsIndex, McsIndex) = default;
};

/// std::nullopt is the "no transmission possible" sentinel.
using Mcs = std::optional<McsIndex>;

/// SNR->MCS thresholds and the (RU, MCS)->PHY-rate table. Single spatial
/// stream, 0.8 us guard interval.
struct RateTable {
  std::array<double, McsIndex::kCount> snr_thresholds{};  // linear
  std::array<int, 6> data_subcarriers{24, 48, 102, 234, 468, 980};
  std::array<double, McsIndex::kCount> coded_bits{0.5, 1.0, 1.5, 2.0, 3.0, 4.0,
                                                  4.5, 5.0, 6.0, 20.0 / 3, 7.5, 25.0 / 3};
  double symbol_duration = 13.6e-6;  // s

  static RateTable defaults();
  static RateTable with_thresholds_db(std::span<const double> thresholds_db);

  /// Throws std::invalid_argument on non-increasing thresholds or a rate
  /// table that is not monotone in RU size and MCS.
  void validate() const;
};

inline constexpr std::array<double, McsIndex::kCount> kDefaultSnrThresholdsDb = {
    2, 5, 9, 11, 15, 18, 20, 25, 29, 31, 34, 37};

double db_to_linear(double db);
double linear_to_db(double linear);

/// Log-distance path loss; distances under 1 m are evaluated at 1 m.
double path_loss_db(double distance, const ChannelParams& params);

/// Linear gain in (0, 1] for the given path loss.
double channel_gain(double path_loss);

double snr(double power, double gain, RuSize ru, const ChannelParams& params);

/// Largest MCS whose threshold is <= snr (inclusive boundary).
Mcs mcs_from_snr(double snr, const RateTable& table);

/// bits/s; zero for the sentinel MCS.
double rate(RuSize ru, Mcs mcs, const RateTable& table);

/// rate(ru, mcs_from_snr(snr(...))).
double achievable_rate(double power, double gain, RuSize ru, const ChannelParams& params,
                       const RateTable& table);

}  // namespace wifimec
