#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ifor/angle_dataset.hpp"
#include "ifor/cbf_codec.hpp"

namespace ifor {

/// The shared candidate set: n_k centroid angle vectors, one per row,
/// plus the training provenance stored in the IFCB file. Centroid entries
/// are range-normalized (phi reduced mod 2*pi, psi clamped to [0, pi/2]).
struct Codebook {
  std::uint16_t n_r = 0;
  std::uint16_t n_c = 0;
  std::uint32_t n_a = 0;
  std::uint32_t n_k = 0;
  std::uint64_t seed = 0;
  std::uint32_t iterations = 0;
  double final_sse = 0.0;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> centroids;

  /// Feedback bits per subcarrier group: ceil(log2 n_k).
  std::uint32_t feedback_bits_per_group() const;
};

enum class Seeding { KMeansPlusPlus, Uniform };

struct TrainingConfig {
  std::uint32_t n_k = 1024;
  std::uint32_t max_iterations = 100;
  double epsilon = 1e-6;  // relative SSE decrease declaring convergence
  std::uint64_t seed = 0;
  Seeding seeding = Seeding::KMeansPlusPlus;
};

/// Lloyd iterations with k-means++ (or plain uniform) seeding: assign
/// each record to the nearest centroid by Euclidean distance on raw
/// angles, recompute centroids as cluster means, repeat until the
/// relative SSE decrease drops below epsilon or max_iterations is hit.
/// Deterministic given (dataset, config). `sse_trace`, when non-null,
/// receives the assignment SSE of every iteration plus the final SSE.
Codebook kmeans_train(const AngleDataset& dataset, const TrainingConfig& cfg,
                      std::vector<double>* sse_trace = nullptr);

/// Index of the nearest centroid (ties to the lowest index).
std::uint32_t encode(const AngleVector& x, const Codebook& cb);
std::uint32_t encode(const Eigen::Ref<const Eigen::RowVectorXd>& x, const Codebook& cb);

/// Centroid `index` as an angle vector.
AngleVector decode(std::uint32_t index, const Codebook& cb);

/// Sum over records of the squared distance to the nearest centroid.
double sse(const AngleDataset& dataset, const Codebook& cb);

inline constexpr std::uint16_t kCodebookFormatVersion = 1;

void save_codebook(const Codebook& cb, const std::filesystem::path& path);
Codebook load_codebook(const std::filesystem::path& path);

}  // namespace ifor
