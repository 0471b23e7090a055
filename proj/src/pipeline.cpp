#include "cld/pipeline.hpp"

#include "cld/error.hpp"
#include "cld/model_io.hpp"

namespace cld {

void save_model(std::ostream& os, const Model& model) {
    const NamedBlock scaler{"scaler", 1, 2, {model.scaler.offset, model.scaler.scale}};
    write_model(os, model.params, std::span<const NamedBlock>(&scaler, 1));
}

Model load_model(std::istream& is) {
    ModelFile file = read_model(is);
    Model model{std::move(file.params), {}};
    if (const auto* block = file.find("scaler")) {
        if (block->values.size() != 2 || !(block->values[1] > 0.0)) {
            throw data_error("model file: scaler block must hold 'offset scale' with scale > 0");
        }
        model.scaler = {block->values[0], block->values[1]};
    }
    return model;
}

FitResult fit_model(const TrainConfig& config, std::span<const double> train_values) {
    const Scaler scaler = fit_scaler(train_values);
    const auto scaled = scaler.apply(train_values);
    const WindowSet windows = build_windows(scaled, config.lag);
    TrainResult trained = train(config, windows);
    return {{std::move(trained.params), scaler}, std::move(trained.report)};
}

std::vector<StreamPoint> predict_stream(const Model& model, std::span<const double> values) {
    std::vector<StreamPoint> points;
    const std::size_t lag = model.lag();
    if (values.size() < lag + 1) return points;
    const auto scaled = model.scaler.apply(values);
    points.reserve(values.size() - lag);
    for (std::size_t t = lag - 1; t + 1 < values.size(); ++t) {
        const std::span<const double> window(scaled.data() + t + 1 - lag, lag);
        const double predicted = model.scaler.invert(predict_window(model.params, window));
        points.push_back({t + 1, values[t + 1], predicted});
    }
    return points;
}

}  // namespace cld
