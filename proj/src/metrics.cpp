#include <stdexcept>
#include <string>

#include "nids/evaluation.hpp"

namespace nids {

ConfusionMatrix confusion(std::span<const Label> predicted, std::span<const Label> truth) {
    if (predicted.size() != truth.size())
        throw std::invalid_argument("confusion: length mismatch (" + std::to_string(predicted.size()) + " vs " +
                                    std::to_string(truth.size()) + ")");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const Label p = predicted[i];
        const Label t = truth[i];
        if ((p != 0 && p != 1) || (t != 0 && t != 1))
            throw std::invalid_argument("confusion: non-binary label at position " + std::to_string(i));
        if (p == 1 && t == 1) ++cm.tp;
        else if (p == 0 && t == 0) ++cm.tn;
        else if (p == 1) ++cm.fp;
        else ++cm.fn;
    }
    return cm;
}

MetricsReport metrics(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw std::invalid_argument("metrics: empty confusion matrix");
    MetricsReport r;
    r.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
    auto ratio = [](std::size_t num, std::size_t den, bool& undefined) {
        undefined = den == 0;
        return undefined ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    };
    r.precision = ratio(cm.tp, cm.tp + cm.fp, r.precision_undefined);
    r.recall = ratio(cm.tp, cm.tp + cm.fn, r.recall_undefined);
    r.far = ratio(cm.fp, cm.tn + cm.fp, r.far_undefined);
    return r;
}

double accuracy(std::span<const Label> predicted, std::span<const Label> truth) {
    return metrics(confusion(predicted, truth)).accuracy;
}

}  // namespace nids
