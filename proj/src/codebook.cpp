#include "ifor/codebook.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "ifor/detail/binary_io.hpp"
#include "ifor/detail/rng.hpp"
#include "ifor/errors.hpp"

namespace ifor {

namespace {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHalfPi = 0.5 * std::numbers::pi;

struct Assignment {
  std::vector<std::uint32_t> labels;
  Eigen::VectorXd point_sq_dist;
  double sse = 0.0;
};

/// Nearest centroid per record via blocked products; ties resolve to the
/// lowest centroid index. Fixed evaluation order keeps results identical
/// regardless of build configuration.
Assignment assign_points(const RowMajorMatrix& points, const RowMajorMatrix& centroids) {
  const Eigen::Index n = points.rows();
  const Eigen::Index k = centroids.rows();
  const Eigen::VectorXd centroid_norms2 = centroids.rowwise().squaredNorm();

  Assignment out;
  out.labels.resize(std::size_t(n));
  out.point_sq_dist.resize(n);

  constexpr Eigen::Index kBlock = 2048;
  Eigen::MatrixXd cross;
  for (Eigen::Index start = 0; start < n; start += kBlock) {
    const Eigen::Index rows = std::min(kBlock, n - start);
    cross.noalias() = points.middleRows(start, rows) * centroids.transpose();
    for (Eigen::Index r = 0; r < rows; ++r) {
      Eigen::Index best = 0;
      double best_score = centroid_norms2(0) - 2.0 * cross(r, 0);
      for (Eigen::Index j = 1; j < k; ++j) {
        const double score = centroid_norms2(j) - 2.0 * cross(r, j);
        if (score < best_score) {
          best_score = score;
          best = j;
        }
      }
      // The expanded score ranks candidates; the winning distance is
      // recomputed directly so exact matches score exactly zero.
      const double d2 = (points.row(start + r) - centroids.row(best)).squaredNorm();
      out.labels[std::size_t(start + r)] = std::uint32_t(best);
      out.point_sq_dist(start + r) = d2;
      out.sse += d2;
    }
  }
  return out;
}

RowMajorMatrix seed_kmeanspp(const RowMajorMatrix& points, std::uint32_t n_k,
                             const Eigen::VectorXd& point_norms2, std::mt19937_64& rng) {
  const Eigen::Index n = points.rows();
  RowMajorMatrix centroids(n_k, points.cols());

  Eigen::Index first = std::min<Eigen::Index>(Eigen::Index(detail::canonical(rng) * double(n)), n - 1);
  centroids.row(0) = points.row(first);

  Eigen::VectorXd d2 =
      (point_norms2.array() + points.row(first).squaredNorm() -
       2.0 * (points * points.row(first).transpose()).array())
          .max(0.0);
  d2(first) = 0.0;

  for (std::uint32_t j = 1; j < n_k; ++j) {
    const double total = d2.sum();
    Eigen::Index pick;
    if (total <= 0.0) {
      pick = std::min<Eigen::Index>(Eigen::Index(detail::canonical(rng) * double(n)), n - 1);
    } else {
      const double target = detail::canonical(rng) * total;
      double cum = 0.0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        cum += d2(i);
        if (cum > target) {
          pick = i;
          break;
        }
      }
    }
    centroids.row(j) = points.row(pick);
    const Eigen::VectorXd cand =
        (point_norms2.array() + points.row(pick).squaredNorm() -
         2.0 * (points * points.row(pick).transpose()).array())
            .max(0.0);
    d2 = d2.cwiseMin(cand);
    d2(pick) = 0.0;
  }
  return centroids;
}

RowMajorMatrix seed_uniform(const RowMajorMatrix& points, std::uint32_t n_k,
                            std::mt19937_64& rng) {
  const Eigen::Index n = points.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[std::size_t(i)] = i;
  // Partial Fisher-Yates: the first n_k slots become a uniform sample
  // without replacement.
  for (std::uint32_t j = 0; j < n_k; ++j) {
    const Eigen::Index span = n - Eigen::Index(j);
    const Eigen::Index offset =
        std::min<Eigen::Index>(Eigen::Index(detail::canonical(rng) * double(span)), span - 1);
    std::swap(order[j], order[std::size_t(j) + std::size_t(offset)]);
  }
  RowMajorMatrix centroids(n_k, points.cols());
  for (std::uint32_t j = 0; j < n_k; ++j) centroids.row(j) = points.row(order[j]);
  return centroids;
}

/// Every empty cluster captures the point currently farthest from its
/// centroid, skipping donors that would become empty themselves.
void repair_empty_clusters(const RowMajorMatrix& centroids, Assignment& a,
                           std::vector<Eigen::Index>& counts) {
  for (Eigen::Index e = 0; e < centroids.rows(); ++e) {
    if (counts[std::size_t(e)] != 0) continue;
    Eigen::Index worst = -1;
    double worst_d2 = -1.0;
    for (Eigen::Index i = 0; i < a.point_sq_dist.size(); ++i) {
      if (counts[a.labels[std::size_t(i)]] < 2) continue;
      if (a.point_sq_dist(i) > worst_d2) {
        worst_d2 = a.point_sq_dist(i);
        worst = i;
      }
    }
    if (worst < 0) continue;  // unreachable when n >= n_k
    counts[a.labels[std::size_t(worst)]]--;
    a.labels[std::size_t(worst)] = std::uint32_t(e);
    counts[std::size_t(e)] = 1;
    a.point_sq_dist(worst) = 0.0;
  }
}

void normalize_centroid_rows(RowMajorMatrix& centroids, int n_r, int n_c) {
  const auto mask = phi_positions(n_r, n_c);
  for (Eigen::Index r = 0; r < centroids.rows(); ++r) {
    for (Eigen::Index c = 0; c < centroids.cols(); ++c) {
      double v = centroids(r, c);
      if (mask[std::size_t(c)]) {
        v = std::fmod(v, kTwoPi);
        if (v < 0.0) v += kTwoPi;
        if (v >= kTwoPi) v = 0.0;
      } else {
        v = std::clamp(v, 0.0, kHalfPi);
      }
      centroids(r, c) = v;
    }
  }
}

void check_codebook(const Codebook& cb) {
  if (cb.n_k < 1)
    throw IoError(IoError::Kind::Malformed, "codebook: n_k must be >= 1");
  if (cb.n_r < 1 || cb.n_c < 1 || cb.n_c > cb.n_r)
    throw IoError(IoError::Kind::Malformed, "codebook: require 1 <= n_c <= n_r");
  if (cb.n_a != count_angles(cb.n_r, cb.n_c))
    throw IoError(IoError::Kind::Malformed, "codebook: n_a inconsistent with n_r, n_c");
  if (cb.centroids.rows() != Eigen::Index(cb.n_k) ||
      cb.centroids.cols() != Eigen::Index(cb.n_a))
    throw IoError(IoError::Kind::Malformed, "codebook: centroid block shape mismatch");
  if (!cb.centroids.allFinite())
    throw IoError(IoError::Kind::Malformed, "codebook: non-finite centroid entry");
  const auto mask = phi_positions(cb.n_r, cb.n_c);
  for (Eigen::Index r = 0; r < cb.centroids.rows(); ++r)
    for (Eigen::Index c = 0; c < cb.centroids.cols(); ++c) {
      const double v = cb.centroids(r, c);
      const bool ok = mask[std::size_t(c)] ? (v >= 0.0 && v < kTwoPi)
                                           : (v >= 0.0 && v <= kHalfPi);
      if (!ok)
        throw IoError(IoError::Kind::Malformed, "codebook: centroid angle out of range");
    }
}

constexpr char kMagic[4] = {'I', 'F', 'C', 'B'};

}  // namespace

std::uint32_t Codebook::feedback_bits_per_group() const {
  return n_k <= 1 ? 0u : std::uint32_t(std::bit_width(n_k - 1));
}

Codebook kmeans_train(const AngleDataset& dataset, const TrainingConfig& cfg,
                      std::vector<double>* sse_trace) {
  const Eigen::Index n = dataset.records.rows();
  if (n == 0) throw std::invalid_argument("kmeans_train: empty dataset");
  if (cfg.n_k < 1) throw std::invalid_argument("kmeans_train: n_k must be >= 1");
  if (std::uint64_t(n) < cfg.n_k)
    throw std::invalid_argument("kmeans_train: dataset smaller than the candidate count");
  if (cfg.max_iterations < 1)
    throw std::invalid_argument("kmeans_train: max_iterations must be >= 1");
  if (cfg.epsilon < 0.0) throw std::invalid_argument("kmeans_train: epsilon must be >= 0");

  const RowMajorMatrix& points = dataset.records;
  const Eigen::VectorXd point_norms2 = points.rowwise().squaredNorm();

  auto rng = detail::substream(cfg.seed, 0, 0);
  RowMajorMatrix centroids = cfg.seeding == Seeding::KMeansPlusPlus
                                 ? seed_kmeanspp(points, cfg.n_k, point_norms2, rng)
                                 : seed_uniform(points, cfg.n_k, rng);

  if (sse_trace) sse_trace->clear();
  double prev_sse = std::numeric_limits<double>::infinity();
  std::uint32_t iterations = 0;
  for (std::uint32_t iter = 0; iter < cfg.max_iterations; ++iter) {
    Assignment a = assign_points(points, centroids);
    if (sse_trace) sse_trace->push_back(a.sse);

    std::vector<Eigen::Index> counts(cfg.n_k, 0);
    for (std::uint32_t label : a.labels) counts[label]++;
    repair_empty_clusters(centroids, a, counts);

    centroids.setZero();
    for (Eigen::Index i = 0; i < n; ++i) centroids.row(a.labels[std::size_t(i)]) += points.row(i);
    for (std::uint32_t j = 0; j < cfg.n_k; ++j) centroids.row(j) /= double(counts[j]);

    ++iterations;
    const bool converged =
        std::isfinite(prev_sse) &&
        (prev_sse <= 0.0 || (prev_sse - a.sse) / prev_sse < cfg.epsilon);
    prev_sse = a.sse;
    if (converged || a.sse == 0.0) break;
  }

  normalize_centroid_rows(centroids, dataset.n_r, dataset.n_c);

  Codebook cb;
  cb.n_r = dataset.n_r;
  cb.n_c = dataset.n_c;
  cb.n_a = dataset.n_a;
  cb.n_k = cfg.n_k;
  cb.seed = cfg.seed;
  cb.iterations = iterations;
  cb.centroids = std::move(centroids);
  cb.final_sse = assign_points(points, cb.centroids).sse;
  if (sse_trace) sse_trace->push_back(cb.final_sse);
  return cb;
}

std::uint32_t encode(const Eigen::Ref<const Eigen::RowVectorXd>& x, const Codebook& cb) {
  if (x.size() != Eigen::Index(cb.n_a))
    throw std::invalid_argument("encode: angle count does not match the codebook");
  Eigen::Index best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < cb.centroids.rows(); ++j) {
    const double d2 = (cb.centroids.row(j) - x).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = j;
    }
  }
  return std::uint32_t(best);
}

std::uint32_t encode(const AngleVector& x, const Codebook& cb) {
  if (x.n_r != cb.n_r || x.n_c != cb.n_c)
    throw std::invalid_argument("encode: angle vector dimensions do not match the codebook");
  return encode(Eigen::RowVectorXd(x.angles.transpose()), cb);
}

AngleVector decode(std::uint32_t index, const Codebook& cb) {
  if (index >= cb.n_k) throw std::out_of_range("decode: codebook index out of range");
  AngleVector a;
  a.n_r = cb.n_r;
  a.n_c = cb.n_c;
  a.angles = cb.centroids.row(index).transpose();
  return a;
}

double sse(const AngleDataset& dataset, const Codebook& cb) {
  if (dataset.n_a != cb.n_a || dataset.n_r != cb.n_r || dataset.n_c != cb.n_c)
    throw std::invalid_argument("sse: dataset and codebook dimensions differ");
  return assign_points(dataset.records, cb.centroids).sse;
}

void save_codebook(const Codebook& cb, const std::filesystem::path& path) {
  check_codebook(cb);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError(IoError::Kind::Malformed, "codebook: cannot open " + path.string() + " for writing");
  out.write(kMagic, sizeof(kMagic));
  detail::write_le<std::uint16_t>(out, kCodebookFormatVersion);
  detail::write_le<std::uint16_t>(out, cb.n_r);
  detail::write_le<std::uint16_t>(out, cb.n_c);
  detail::write_le<std::uint32_t>(out, cb.n_a);
  detail::write_le<std::uint32_t>(out, cb.n_k);
  detail::write_le<std::uint64_t>(out, cb.seed);
  detail::write_le<std::uint32_t>(out, cb.iterations);
  detail::write_f64(out, cb.final_sse);
  for (Eigen::Index r = 0; r < cb.centroids.rows(); ++r)
    for (Eigen::Index c = 0; c < cb.centroids.cols(); ++c)
      detail::write_f64(out, cb.centroids(r, c));
  if (!out)
    throw IoError(IoError::Kind::Malformed, "codebook: write failure on " + path.string());
}

Codebook load_codebook(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError(IoError::Kind::Malformed, "codebook: cannot open " + path.string());
  char magic[4];
  in.read(magic, sizeof(magic));
  if (in.gcount() != sizeof(magic) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw IoError(IoError::Kind::BadMagic, "codebook: bad magic in " + path.string());
  const auto version = detail::read_le<std::uint16_t>(in, "codebook header");
  if (version != kCodebookFormatVersion)
    throw IoError(IoError::Kind::BadVersion,
                  "codebook: unsupported format version " + std::to_string(version));

  Codebook cb;
  cb.n_r = detail::read_le<std::uint16_t>(in, "codebook header");
  cb.n_c = detail::read_le<std::uint16_t>(in, "codebook header");
  cb.n_a = detail::read_le<std::uint32_t>(in, "codebook header");
  cb.n_k = detail::read_le<std::uint32_t>(in, "codebook header");
  cb.seed = detail::read_le<std::uint64_t>(in, "codebook header");
  cb.iterations = detail::read_le<std::uint32_t>(in, "codebook header");
  cb.final_sse = detail::read_f64(in, "codebook header");
  cb.centroids.resize(Eigen::Index(cb.n_k), Eigen::Index(cb.n_a));
  for (Eigen::Index r = 0; r < cb.centroids.rows(); ++r)
    for (Eigen::Index c = 0; c < cb.centroids.cols(); ++c)
      cb.centroids(r, c) = detail::read_f64(in, "codebook centroids");
  check_codebook(cb);
  return cb;
}

}  // namespace ifor
