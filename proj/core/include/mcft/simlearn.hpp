#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "mcft/types.hpp"

namespace mcft {

// Target-specific bilinear similarity phi(a, b) = a^T W b, learned online
// with passive-aggressive triplet updates. W starts at the identity and is
// never projected or symmetrized.
struct SimilarityModel {
  Eigen::MatrixXd W;
  double aggressiveness = 0.1;  // C
  std::int64_t update_count = 0;

  static SimilarityModel identity(Eigen::Index dim, double aggressiveness = 0.1);
  Eigen::Index dim() const { return W.rows(); }
};

struct Triplet {
  Feature anchor;
  Feature positive;
  Feature negative;
};

double similarity(const SimilarityModel& model, const Feature& a, const Feature& b);

// max(0, 1 - phi(a, a+) + phi(a, a-)).
double hinge_loss(const SimilarityModel& model, const Triplet& triplet);

struct PaStep {
  double loss = 0.0;        // L before the update
  double alpha = 0.0;       // applied step, in [0, C]
  double v_norm_sq = 0.0;   // ||a (a+ - a-)^T||_F^2
};

// Closed-form PA-I step: W <- W + alpha a (a+ - a-)^T with
// alpha = min(C, L / ||V||_F^2). No-op when L == 0. Throws DegenerateTriplet
// when L > 0 but V vanishes.
PaStep pa_update(SimilarityModel& model, const Triplet& triplet);

// Sequential pa_update over `triplets` in order.
void update_model(SimilarityModel& model, std::span<const Triplet> triplets);

// One triplet list per input slot. `templates[k]` is the appearance template
// of trajectory k before this frame, `associated[k]` the feature it received
// at the committed frame (or nullptr). Trajectory k gets one triplet
// (template_k, a_k, a_l) for every other associated trajectory l.
std::vector<std::vector<Triplet>> build_triplets(std::span<const Feature> templates,
                                                 std::span<const Feature* const> associated);

// Binary snapshot: int64 m, double C, int64 update_count, m*m doubles of W in
// row-major order, all little-endian host layout.
void save_model(std::ostream& out, const SimilarityModel& model);
SimilarityModel load_model(std::istream& in);

}  // namespace mcft
