#pragma once

#include "cvs/label_map.hpp"

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace cvs {

// Per-class overlap scores. A class absent from both maps has no defined
// IoU/Dice and is excluded from the macro means; the means themselves are
// absent when no requested class is defined.
struct ClassMetrics {
    std::map<ClassId, std::optional<double>> iou;
    std::map<ClassId, std::optional<double>> dice;
    std::optional<double> miou;
    std::optional<double> mdice;
    double pixel_acc = 0.0;
};

ClassMetrics seg_metrics(const LabelMap& gt, const LabelMap& pred,
                         std::span<const ClassId> classes);

struct ConfusionCounts {
    long long tp = 0;
    long long fp = 0;
    long long tn = 0;
    long long fn = 0;

    long long total() const { return tp + fp + tn + fn; }
};

// Rates derived from a confusion table. A rate whose denominator is zero is
// absent (serialized as null, printed as NaN); balanced accuracy is absent
// when either class rate is.
struct BinaryMetrics {
    std::optional<double> acc;
    std::optional<double> bacc;
    std::optional<double> ppv;
    std::optional<double> npv;
};

BinaryMetrics binary_metrics(const ConfusionCounts& cc);

// One frame's criterion outcomes.
struct CriterionLabels {
    bool c1 = false;
    bool c2 = false;
    bool c3 = false;
    bool cvs = false;
};

struct RunScore {
    ConfusionCounts c1;
    ConfusionCounts c2;
    ConfusionCounts c3;
    ConfusionCounts cvs;
};

// Pools per-criterion confusion counts over aligned truth/prediction lists.
// Throws LengthMismatch when the lists disagree in length.
RunScore score_run(std::span<const CriterionLabels> truth,
                   std::span<const CriterionLabels> predictions);

} // namespace cvs
