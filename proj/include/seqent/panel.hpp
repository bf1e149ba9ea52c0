#pragma once

#include <string>
#include <vector>

#include "seqent/measure.hpp"
#include "seqent/point.hpp"

namespace seqent {

struct PointPair {
  std::string label;
  PointRep x;
  PointRep y;
};

/// A named system with its canonical pairs.
struct PanelSystem {
  std::string id;
  std::string description;
  MarkovMeasure measure;
  std::vector<PointPair> pairs;
};

/// Full 2-shift with P = [[1/2, 1/2], [1/2, 1/2]].
MarkovMeasure bernoulli_half();
/// Golden-mean shift ("11" forbidden) with P = [[1/2, 1/2], [1, 0]], pi = (2/3, 1/3).
MarkovMeasure golden_mean_measure();
/// Periodic 4-cycle 0 -> 1 -> 2 -> 3 -> 0 with the uniform measure.
MarkovMeasure four_cycle_measure();

/// Bernoulli, golden mean and 4-cycle, each with 10 canonical pairs.
std::vector<PanelSystem> acceptance_panel();

}  // namespace seqent
