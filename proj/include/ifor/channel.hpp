#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ifor/angle_dataset.hpp"
#include "ifor/linalg.hpp"

namespace ifor {

enum class ChannelModelName { A, B, D, Custom };

std::string to_string(ChannelModelName name);
ChannelModelName channel_model_from_string(const std::string& name);

/// Tapped-delay-line model: `n_taps` i.i.d. Rayleigh tap matrices at
/// delays k * tap_spacing, powers following an exponential profile
/// normalized to unit total power. Optional square-root correlation
/// matrices (empty means identity) give a Kronecker-shaped spatial
/// structure: tap <- rx_corr_sqrt * tap * tx_corr_sqrt.
struct ChannelModelSpec {
  ChannelModelName name = ChannelModelName::Custom;
  int n_taps = 1;
  double tap_spacing = 0.0;        // seconds
  double rms_delay_spread = 0.0;   // seconds
  int n_tx = 1;
  int n_rx = 1;
  Eigen::VectorXd tap_powers;      // normalized PDP, length n_taps
  ComplexMatrix tx_corr_sqrt;      // n_tx x n_tx or empty
  ComplexMatrix rx_corr_sqrt;      // n_rx x n_rx or empty

  double tap_delay(int k) const { return k * tap_spacing; }
};

/// Profiles matching the three delay-spread classes used throughout:
///   A -> 1 tap, flat fading;
///   B -> 7 taps, 10 ns spacing, 15 ns rms delay spread;
///   D -> 16 taps, 20 ns spacing, 50 ns rms delay spread.
/// The exponential decay constant is solved so the discrete profile hits
/// the target rms delay spread exactly.
ChannelModelSpec default_model(ChannelModelName name, int n_tx = 8, int n_rx = 2);

/// Arbitrary tap count / spacing / delay spread with the same exponential
/// profile construction. rms == 0 requires n_taps == 1 and vice versa.
ChannelModelSpec custom_model(int n_taps, double tap_spacing, double rms_delay_spread,
                              int n_tx, int n_rx);

/// Hermitian square root of the exponential correlation matrix
/// R[i][j] = rho^|i-j|. Requires 0 <= rho < 1; rho == 0 gives identity.
ComplexMatrix exponential_correlation_sqrt(int n, double rho);

/// Copy of `spec` with transmit-side exponential correlation rho applied
/// through the Kronecker hook (rho == 0 clears it back to identity).
ChannelModelSpec with_tx_correlation(ChannelModelSpec spec, double rho);

/// One random draw of the model's tap matrices.
struct ChannelRealization {
  ChannelModelSpec spec;
  std::vector<ComplexMatrix> taps;  // n_taps matrices of n_rx x n_tx
};

ChannelRealization draw_realization(const ChannelModelSpec& spec, std::mt19937_64& rng);
ChannelRealization draw_realization(const ChannelModelSpec& spec, std::uint64_t seed);

/// H(f_m) = sum_k taps[k] * e^{-j 2 pi f_m tau_k} with f_m = m * spacing,
/// one matrix per requested subcarrier index.
std::vector<ComplexMatrix> frequency_response(const ChannelRealization& real,
                                              const std::vector<int>& subcarrier_indices,
                                              double subcarrier_spacing);

/// Draws `n_realizations` realizations per model, computes the steering
/// matrix at the first tone of each subcarrier group, decomposes it to
/// angles, and collects the records. Multiple models are interleaved
/// round-robin by realization index. Deterministic given `seed`.
AngleDataset generate_dataset(const std::vector<ChannelModelSpec>& specs,
                              int n_realizations, int n_c, int n_g, int n_subcarriers,
                              double subcarrier_spacing, std::uint64_t seed);

}  // namespace ifor
