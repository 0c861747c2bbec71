#include "mcft/simlearn.hpp"

#include <algorithm>
#include <cstring>
#include <istream>
#include <ostream>

#include "mcft/error.hpp"

namespace mcft {

namespace {

void check_dim(const SimilarityModel& model, const Feature& v, const char* what) {
  if (v.size() != model.dim()) {
    throw ContractViolation(std::string("feature dimension mismatch (") + what + ")");
  }
}

}  // namespace

SimilarityModel SimilarityModel::identity(Eigen::Index dim, double aggressiveness) {
  if (!(aggressiveness > 0.0)) throw ContractViolation("aggressiveness C must be positive");
  return {Eigen::MatrixXd::Identity(dim, dim), aggressiveness, 0};
}

double similarity(const SimilarityModel& model, const Feature& a, const Feature& b) {
  check_dim(model, a, "a");
  check_dim(model, b, "b");
  return a.dot(model.W * b);
}

double hinge_loss(const SimilarityModel& model, const Triplet& triplet) {
  const double margin = similarity(model, triplet.anchor, triplet.positive) -
                        similarity(model, triplet.anchor, triplet.negative);
  return std::max(0.0, 1.0 - margin);
}

PaStep pa_update(SimilarityModel& model, const Triplet& triplet) {
  PaStep step;
  step.loss = hinge_loss(model, triplet);
  const Feature diff = triplet.positive - triplet.negative;
  // ||a d^T||_F^2 = ||a||^2 ||d||^2
  step.v_norm_sq = triplet.anchor.squaredNorm() * diff.squaredNorm();
  if (step.loss <= 0.0) return step;
  if (!(step.v_norm_sq > 0.0)) {
    throw DegenerateTriplet("positive hinge loss with a zero update direction");
  }
  step.alpha = std::min(model.aggressiveness, step.loss / step.v_norm_sq);
  model.W.noalias() += step.alpha * triplet.anchor * diff.transpose();
  ++model.update_count;
  return step;
}

void update_model(SimilarityModel& model, std::span<const Triplet> triplets) {
  for (const Triplet& t : triplets) pa_update(model, t);
}

std::vector<std::vector<Triplet>> build_triplets(std::span<const Feature> templates,
                                                 std::span<const Feature* const> associated) {
  if (templates.size() != associated.size()) {
    throw ContractViolation("templates and associations must have equal length");
  }
  std::vector<std::vector<Triplet>> out(templates.size());
  for (std::size_t k = 0; k < templates.size(); ++k) {
    if (associated[k] == nullptr) continue;
    for (std::size_t l = 0; l < templates.size(); ++l) {
      if (l == k || associated[l] == nullptr) continue;
      out[k].push_back({templates[k], *associated[k], *associated[l]});
    }
  }
  return out;
}

namespace {

template <typename T>
void put(std::ostream& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.write(bytes, sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  char bytes[sizeof(T)];
  if (!in.read(bytes, sizeof(T))) throw ParseError("truncated similarity model snapshot");
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void save_model(std::ostream& out, const SimilarityModel& model) {
  const std::int64_t m = model.dim();
  put(out, m);
  put(out, model.aggressiveness);
  put(out, model.update_count);
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index c = 0; c < m; ++c) put(out, model.W(r, c));
  }
}

SimilarityModel load_model(std::istream& in) {
  const auto m = get<std::int64_t>(in);
  if (m < 0 || m > 1 << 16) throw ParseError("implausible model dimension");
  SimilarityModel model;
  model.aggressiveness = get<double>(in);
  model.update_count = get<std::int64_t>(in);
  model.W.resize(m, m);
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index c = 0; c < m; ++c) model.W(r, c) = get<double>(in);
  }
  return model;
}

}  // namespace mcft
