#include "oqs/measurement.hpp"

#include <algorithm>
#include <cmath>

namespace oqs {

namespace {

void require_valid_shape(const PovmSet& set) {
    if (set.outcomes.empty()) throw InvalidArgument("POVM needs at least one outcome");
    for (const auto& o : set.outcomes)
        if (o.op.space != set.space)
            throw InvalidArgument("POVM outcome operator on a different space");
}

}  // namespace

PovmReport validate_povm(const PovmSet& set) {
    require_valid_shape(set);
    const Eigen::Index d = set.space.total_dim();
    Mat sum = Mat::Zero(d, d);
    for (const auto& o : set.outcomes) sum += o.op.matrix.adjoint() * o.op.matrix;

    PovmReport report;
    report.completeness_error = (sum - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
    report.valid = report.completeness_error <= 1e-10;

    report.projective_error = 0;
    for (std::size_t a = 0; a < set.outcomes.size(); ++a) {
        const Mat& pa = set.outcomes[a].op.matrix;
        report.projective_error = std::max(report.projective_error,
                                           (pa - pa.adjoint()).cwiseAbs().maxCoeff());
        for (std::size_t b = 0; b < set.outcomes.size(); ++b) {
            const Mat& pb = set.outcomes[b].op.matrix;
            Mat expect = a == b ? pa : Mat(Mat::Zero(d, d));
            report.projective_error =
                std::max(report.projective_error, (pa * pb - expect).cwiseAbs().maxCoeff());
        }
    }
    report.projective = report.valid && report.projective_error <= 1e-10;
    return report;
}

std::pair<DensityMatrix, double> apply_read(const DensityMatrix& rho, const PovmSet& set,
                                            const std::string& label) {
    require_valid_shape(set);
    if (rho.space() != set.space) throw InvalidArgument("apply_read: state on a different space");
    for (const auto& o : set.outcomes) {
        if (o.label != label) continue;
        Mat post = o.op.matrix * rho.matrix() * o.op.matrix.adjoint();
        double p = post.trace().real();
        if (p <= 1e-14)
            throw ImpossibleOutcome("apply_read: outcome '" + label +
                                    "' has vanishing probability");
        return {DensityMatrix::validated({set.space, post / p}), p};
    }
    throw InvalidArgument("apply_read: unknown outcome label '" + label + "'");
}

DensityMatrix apply_unread(const DensityMatrix& rho, const PovmSet& set) {
    require_valid_shape(set);
    if (rho.space() != set.space)
        throw InvalidArgument("apply_unread: state on a different space");
    const Eigen::Index d = set.space.total_dim();
    Mat out = Mat::Zero(d, d);
    for (const auto& o : set.outcomes)
        out.noalias() += o.op.matrix * rho.matrix() * o.op.matrix.adjoint();
    return DensityMatrix::validated({set.space, std::move(out)});
}

std::string sample_outcome(const DensityMatrix& rho, const PovmSet& set, RandomStream& rng) {
    require_valid_shape(set);
    if (rho.space() != set.space)
        throw InvalidArgument("sample_outcome: state on a different space");
    std::vector<double> probs;
    probs.reserve(set.outcomes.size());
    double total = 0;
    for (const auto& o : set.outcomes) {
        double p = (o.op.matrix * rho.matrix() * o.op.matrix.adjoint()).trace().real();
        p = std::max(p, 0.0);
        probs.push_back(p);
        total += p;
    }
    if (total <= 0) throw NumericError("sample_outcome: all outcome probabilities vanish");
    double u = rng.uniform() * total;
    double cum = 0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        cum += probs[k];
        if (u < cum) return set.outcomes[k].label;
    }
    return set.outcomes.back().label;
}

SuperOp povm_superop(const PovmSet& set) {
    require_valid_shape(set);
    std::vector<Mat> kraus;
    kraus.reserve(set.outcomes.size());
    for (const auto& o : set.outcomes) kraus.push_back(o.op.matrix);
    return kraus_to_superop(set.space, kraus);
}

}  // namespace oqs
