#pragma once

#include <vector>

#include "oppfl/sim_engine.hpp"

namespace oppfl {

// Candidate values for the grid search; defaults are the documented grid.
struct TuneGrid {
  std::vector<double> etas{0.01, 0.05, 0.1};
  std::vector<double> lambdas{0.5, 1.0, 2.0};
  std::vector<double> kappas{1.0, 2.0};
  std::vector<double> phis{0.5, 1.0};
};

struct TunePoint {
  double eta, lambda, kappa, phi;
  double accuracy;
};

struct TuneResult {
  TunePoint best{};
  std::vector<TunePoint> points;
};

// Scores every grid point on a personalization task carved entirely from the
// scenario's bootstrap slice: a short scripted-encounter run under the
// momentum strategy, judged by final goal accuracy. Deterministic per
// scenario seed.
TuneResult tune_hyperparameters(const Scenario& scenario, const TuneGrid& grid);

}  // namespace oppfl
