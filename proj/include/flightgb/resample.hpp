#pragma once

// Randomized-SMOTE over-sampling of the minority class.
//
// For every minority row x_i (in row order) two other distinct minority rows
// x_a, x_b are drawn; then k = percent / 100 times:
//   t ~ U[0,1),  y = x_a + t (x_b - x_a) = (1 - t) x_a + t x_b
//   u ~ U[0,1),  z = x_i + u (y - x_i)   = (1 - u) x_i + u y
// and z is appended with the minority label. Every z lies in the triangle
// (x_i, x_a, x_b).
//
// Draw order (part of the reproducibility contract), with m minority rows and
// x_i at position p among them:
//   a = below(m - 1), shifted up by one when >= p
//   b = below(m - 1), shifted likewise, redrawn while b == a
//   then per synthetic point: t, u

#include <cstdint>
#include <span>
#include <vector>

#include "flightgb/encode.hpp"
#include "flightgb/error.hpp"
#include "flightgb/rng.hpp"

namespace flightgb {

struct SmoteConfig {
  unsigned percent = 200;
  std::uint64_t seed = 0;

  unsigned k() const noexcept { return percent / 100; }

  void validate() const {
    if (percent == 0 || percent % 100 != 0)
      throw Error(Errc::InvalidPercent,
                  "SMOTE percent must be a positive multiple of 100, got " + std::to_string(percent));
  }
};

/// One synthetic point, evaluated in convex-combination form so that the
/// endpoints are reproduced exactly (t = 0, u = 1 gives x_a).
inline void smote_point(std::span<const double> xi, std::span<const double> xa,
                        std::span<const double> xb, double t, double u, std::span<double> z) {
  for (std::size_t c = 0; c < z.size(); ++c) {
    const double y = (1.0 - t) * xa[c] + t * xb[c];
    z[c] = (1.0 - u) * xi[c] + u * y;
  }
}

/// Where a synthetic row came from (row indices refer to the input matrix).
struct SyntheticOrigin {
  std::size_t seed_row;
  std::size_t a;
  std::size_t b;
  double t;
  double u;
};

/// The minority label: whichever class has fewer rows, 1 on a tie.
inline std::uint8_t minority_label(const FeatureMatrix& fm) {
  const std::size_t pos = fm.positives();
  return pos <= fm.labels.size() - pos ? 1 : 0;
}

/// Original rows first (unchanged, in order), synthetic rows after.
inline FeatureMatrix random_smote(const FeatureMatrix& fm, const SmoteConfig& cfg,
                                  std::vector<SyntheticOrigin>* origins = nullptr) {
  cfg.validate();
  if (fm.labels.size() != fm.rows())
    throw Error(Errc::MissingValue, "SMOTE needs a labeled matrix");
  const std::uint8_t minority = minority_label(fm);
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < fm.rows(); ++i)
    if (fm.labels[i] == minority) members.push_back(i);
  const std::size_t m = members.size();
  if (m < 3)
    throw Error(Errc::MinorityTooSmall,
                "SMOTE needs at least 3 minority rows, found " + std::to_string(m));

  const unsigned k = cfg.k();
  const std::size_t d = fm.cols();
  FeatureMatrix out = fm;
  out.unseen_categories = 0;
  out.values.reserve_rows(fm.rows() + m * k);
  out.labels.reserve(fm.rows() + m * k);
  if (origins) {
    origins->clear();
    origins->reserve(m * k);
  }

  Rng rng(cfg.seed);
  std::vector<double> z(d);
  for (std::size_t p = 0; p < m; ++p) {
    auto other = [&] {
      auto q = static_cast<std::size_t>(rng.below(m - 1));
      return q >= p ? q + 1 : q;
    };
    const std::size_t qa = other();
    std::size_t qb = other();
    while (qb == qa) qb = other();

    const auto xi = fm.values.row(members[p]);
    const auto xa = fm.values.row(members[qa]);
    const auto xb = fm.values.row(members[qb]);
    for (unsigned j = 0; j < k; ++j) {
      const double t = rng.uniform01();
      const double u = rng.uniform01();
      smote_point(xi, xa, xb, t, u, z);
      out.values.append_row(z);
      out.labels.push_back(minority);
      if (origins) origins->push_back({members[p], members[qa], members[qb], t, u});
    }
  }
  return out;
}

}  // namespace flightgb
