#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "cld/calibration.hpp"
#include "cld/lstm.hpp"
#include "cld/series.hpp"

namespace cld {

/// A trained predictor together with the normalization fitted on its
/// training series.
struct Model {
    LstmParams params;
    Scaler scaler;

    std::size_t lag() const noexcept { return params.input_dim; }
};

/// Model file with an extra `scaler 1 2` block holding "offset scale".
void save_model(std::ostream& os, const Model& model);

/// A file without a scaler block loads with the identity scaler.
Model load_model(std::istream& is);

/// Fits the scaler on `train_values`, windows the scaled series and trains.
struct FitResult {
    Model model;
    TrainReport report;
};
FitResult fit_model(const TrainConfig& config, std::span<const double> train_values);

/// Replays the series one step at a time: for every t >= lag - 1 the window
/// ending at t predicts step t + 1. Predictions are mapped back to the raw
/// count scale, so relative errors are measured on counts.
std::vector<StreamPoint> predict_stream(const Model& model, std::span<const double> values);

}  // namespace cld
