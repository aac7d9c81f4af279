#pragma once

#include <vector>

#include "ospat/track_model.hpp"

namespace ospat {

// OSPA-T parameters: order p, base-distance order p_prime, cut-off c and
// labeling penalty alpha. Defaults are p = p' = 1, c = 100, alpha = 75.
struct MetricParams {
  double p = 1.0;
  double p_prime = 1.0;
  double c = 100.0;
  double alpha = 75.0;

  // Throws InvalidInput unless p >= 1, p_prime >= 1, c > 0, 0 <= alpha <= c.
  void validate() const;
};

// p'-norm of the positional difference; velocities are ignored.
double localisation_distance(const KinematicState& a, const KinematicState& b, double p_prime);

// (d_loc^p' + (alpha * [labels differ])^p')^(1/p')
double base_distance(const LabeledState& a, const LabeledState& b, const MetricParams& params);

// min(c, base_distance)
double cutoff_base_distance(const LabeledState& a, const LabeledState& b, const MetricParams& params);

// OSPA distance between two labeled sets, in [0, c]. Both empty gives 0.
// The optimal injection of the smaller set into the larger is found with
// solve_assignment on the matrix of cut-off distances raised to p.
// Throws InvalidInput on a repeated label within either set.
double ospa_labeled_sets(const std::vector<LabeledState>& x, const std::vector<LabeledState>& y,
                         const MetricParams& params);

}  // namespace ospat
