#include "wifimec/channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wifimec {

void ChannelParams::validate() const {
  if (!(noise_psd > 0)) throw std::invalid_argument("channel: noise_psd must be > 0");
  if (!(ru_unit_bandwidth > 0)) throw std::invalid_argument("channel: ru_unit_bandwidth must be > 0");
  if (!(carrier_frequency > 0)) throw std::invalid_argument("channel: carrier_frequency must be > 0");
  if (!(pathloss_exponent >= 2)) throw std::invalid_argument("channel: pathloss_exponent must be >= 2");
}

int ru_index(RuSize ru) {
  const auto it = std::find(kRuSizes.begin(), kRuSizes.end(), ru);
  if (it == kRuSizes.end()) throw std::invalid_argument("illegal RU size");
  return static_cast<int>(it - kRuSizes.begin());
}

RuSize ru_from_units(int u) {
  for (RuSize ru : kRuSizes)
    if (units(ru) == u) return ru;
  throw std::invalid_argument("illegal RU size " + std::to_string(u) + " (expected 1,2,4,9,18,36)");
}

RateTable RateTable::defaults() { return with_thresholds_db(kDefaultSnrThresholdsDb); }

RateTable RateTable::with_thresholds_db(std::span<const double> thresholds_db) {
  if (thresholds_db.size() != McsIndex::kCount)
    throw std::invalid_argument("rate table: expected 12 SNR thresholds");
  RateTable t;
  std::transform(thresholds_db.begin(), thresholds_db.end(), t.snr_thresholds.begin(), db_to_linear);
  t.validate();
  return t;
}

void RateTable::validate() const {
  for (std::size_t k = 1; k < snr_thresholds.size(); ++k)
    if (!(snr_thresholds[k] > snr_thresholds[k - 1]))
      throw std::invalid_argument("rate table: SNR thresholds must be strictly increasing");
  if (!(snr_thresholds[0] >= 0)) throw std::invalid_argument("rate table: negative SNR threshold");
  for (std::size_t i = 1; i < data_subcarriers.size(); ++i)
    if (data_subcarriers[i] <= data_subcarriers[i - 1])
      throw std::invalid_argument("rate table: subcarrier counts must increase with RU size");
  for (std::size_t k = 1; k < coded_bits.size(); ++k)
    if (!(coded_bits[k] > coded_bits[k - 1]))
      throw std::invalid_argument("rate table: coded bits must increase with MCS");
  if (!(coded_bits[0] > 0) || !(symbol_duration > 0) || data_subcarriers[0] <= 0)
    throw std::invalid_argument("rate table: non-positive entries");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

double path_loss_db(double distance, const ChannelParams& params) {
  if (!(distance > 0)) throw std::invalid_argument("path_loss_db: distance must be > 0");
  return params.pathloss_ref_db + 10.0 * params.pathloss_exponent * std::log10(std::max(distance, 1.0));
}

double channel_gain(double path_loss) { return std::min(1.0, std::pow(10.0, -path_loss / 10.0)); }

double snr(double power, double gain, RuSize ru, const ChannelParams& params) {
  return power * gain / (params.noise_psd * units(ru) * params.ru_unit_bandwidth);
}

Mcs mcs_from_snr(double snr, const RateTable& table) {
  const auto& thr = table.snr_thresholds;
  // First threshold strictly above snr; the one before it is the pick.
  const auto it = std::upper_bound(thr.begin(), thr.end(), snr);
  if (it == thr.begin()) return std::nullopt;
  return McsIndex(static_cast<int>(it - thr.begin()) - 1);
}

double rate(RuSize ru, Mcs mcs, const RateTable& table) {
  if (!mcs) return 0.0;
  return table.data_subcarriers[ru_index(ru)] * table.coded_bits[mcs->index] / table.symbol_duration;
}

double achievable_rate(double power, double gain, RuSize ru, const ChannelParams& params,
                       const RateTable& table) {
  return rate(ru, mcs_from_snr(snr(power, gain, ru, params), table), table);
}

}  // namespace wifimec
