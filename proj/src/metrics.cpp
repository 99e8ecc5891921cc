#include "cvs/metrics.hpp"

#include "cvs/error.hpp"

#include <sstream>

namespace cvs {

ClassMetrics seg_metrics(const LabelMap& gt, const LabelMap& pred,
                         std::span<const ClassId> classes) {
    if (gt.width() != pred.width() || gt.height() != pred.height()) {
        std::ostringstream oss;
        oss << "seg_metrics: " << gt.width() << "x" << gt.height() << " vs " << pred.width()
            << "x" << pred.height();
        fail(Errc::DimensionMismatch, oss.str());
    }
    ClassMetrics out;
    const auto a = gt.data();
    const auto b = pred.data();
    std::size_t matches = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == b[i]) ++matches;
    }
    out.pixel_acc = double(matches) / double(a.size());

    double iou_sum = 0.0;
    double dice_sum = 0.0;
    int defined = 0;
    for (const ClassId c : classes) {
        std::size_t inter = 0;
        std::size_t gt_count = 0;
        std::size_t pred_count = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const bool in_gt = a[i] == c;
            const bool in_pred = b[i] == c;
            gt_count += in_gt;
            pred_count += in_pred;
            inter += in_gt && in_pred;
        }
        const std::size_t uni = gt_count + pred_count - inter;
        if (uni == 0) {
            out.iou[c] = std::nullopt;
            out.dice[c] = std::nullopt;
            continue;
        }
        const double iou = double(inter) / double(uni);
        const double dice = 2.0 * double(inter) / double(gt_count + pred_count);
        out.iou[c] = iou;
        out.dice[c] = dice;
        iou_sum += iou;
        dice_sum += dice;
        ++defined;
    }
    if (defined > 0) {
        out.miou = iou_sum / defined;
        out.mdice = dice_sum / defined;
    }
    return out;
}

BinaryMetrics binary_metrics(const ConfusionCounts& cc) {
    if (cc.tp < 0 || cc.fp < 0 || cc.tn < 0 || cc.fn < 0) {
        fail(Errc::InvalidArgument, "binary_metrics: negative count");
    }
    if (cc.total() == 0) fail(Errc::InvalidArgument, "binary_metrics: empty confusion table");
    BinaryMetrics m;
    m.acc = double(cc.tp + cc.tn) / double(cc.total());
    std::optional<double> tpr;
    std::optional<double> tnr;
    if (cc.tp + cc.fn > 0) tpr = double(cc.tp) / double(cc.tp + cc.fn);
    if (cc.tn + cc.fp > 0) tnr = double(cc.tn) / double(cc.tn + cc.fp);
    if (tpr && tnr) m.bacc = (*tpr + *tnr) / 2.0;
    if (cc.tp + cc.fp > 0) m.ppv = double(cc.tp) / double(cc.tp + cc.fp);
    if (cc.tn + cc.fn > 0) m.npv = double(cc.tn) / double(cc.tn + cc.fn);
    return m;
}

namespace {

void tally(ConfusionCounts& cc, bool truth, bool pred) {
    if (truth && pred) ++cc.tp;
    else if (truth && !pred) ++cc.fn;
    else if (!truth && pred) ++cc.fp;
    else ++cc.tn;
}

} // namespace

RunScore score_run(std::span<const CriterionLabels> truth,
                   std::span<const CriterionLabels> predictions) {
    if (truth.size() != predictions.size()) {
        std::ostringstream oss;
        oss << "score_run: " << truth.size() << " labels vs " << predictions.size()
            << " predictions";
        fail(Errc::LengthMismatch, oss.str());
    }
    RunScore score;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        tally(score.c1, truth[i].c1, predictions[i].c1);
        tally(score.c2, truth[i].c2, predictions[i].c2);
        tally(score.c3, truth[i].c3, predictions[i].c3);
        tally(score.cvs, truth[i].cvs, predictions[i].cvs);
    }
    return score;
}

} // namespace cvs
