#include "ordifun/reducers.hpp"

#include <map>
#include <utility>

#include "ordifun/eigensolve.hpp"
#include "ordifun/errors.hpp"

namespace ordifun {

std::string to_string(ReducerKind kind) {
    switch (kind) {
        case ReducerKind::focca: return "focca";
        case ReducerKind::fpca: return "fpca";
        case ReducerKind::fofd: return "fofd";
        case ReducerKind::heuristic: return "heuristic";
    }
    return "unknown";
}

ReducerKind reducer_kind_from_string(const std::string& name) {
    if (name == "focca") return ReducerKind::focca;
    if (name == "fpca") return ReducerKind::fpca;
    if (name == "fofd") return ReducerKind::fofd;
    if (name == "heuristic") return ReducerKind::heuristic;
    throw ValidationError("bad_method", "unknown reducer '" + name + "'");
}

namespace {

void require_matching_units(const FunctionalDataset& data, const OrdinalLabels& labels) {
    if (data.n_units() != labels.n_units()) {
        throw ValidationError("length_mismatch", "dataset and labels disagree on unit count");
    }
}

void require_same_basis(const BasisSpec& model_basis, const FunctionalDataset& data) {
    if (!(model_basis == data.basis)) {
        throw ValidationError("basis_mismatch", "dataset basis differs from the model basis");
    }
}

}  // namespace

FoccaModel fit_focca(const FunctionalDataset& data, const OrdinalLabels& labels,
                     double lambda1, double lambda2, int m) {
    require_matching_units(data, labels);
    const int n = data.n_units();
    const int nj = data.basis.n_basis();
    const int width = labels.max_level;
    if (n < 2) throw ValidationError("too_few_units", "fit_focca needs at least two units");
    if (lambda1 < 0.0 || lambda2 < 0.0) {
        throw ValidationError("bad_lambda", "penalties must be nonnegative");
    }
    if (m < 1 || m > std::min(nj, width)) {
        throw ValidationError("bad_m", "m must be in {1...min(n_basis, max_level)}");
    }

    auto [centered_a, coeff_mean] = center_columns(data.coefficients);
    auto [centered_d, y_mean] = center_columns(encode_cumulative(labels).matrix);

    const double inv_n = 1.0 / static_cast<double>(n);
    const Eigen::MatrixXd v11 = inv_n * (centered_a.transpose() * centered_a);
    const Eigen::MatrixXd v12 = inv_n * (centered_a.transpose() * centered_d);
    const Eigen::MatrixXd v22 = inv_n * (centered_d.transpose() * centered_d);

    const GramPair gp = gram_matrices(data.basis);
    const Eigen::MatrixXd c12 = gp.gram * v12;
    const Eigen::MatrixXd s1 = gp.gram * v11 * gp.gram + lambda1 * gp.curvature;
    const Eigen::MatrixXd s2 = v22 + lambda2 * Eigen::MatrixXd::Identity(width, width);

    FoccaModel model{.pairs = {},
                     .coeff_mean = std::move(coeff_mean),
                     .y_mean = std::move(y_mean),
                     .lambda1 = lambda1,
                     .lambda2 = lambda2,
                     .m = m,
                     .basis = data.basis};
    for (auto& triple : cca_svd(c12, s1, s2, m)) {
        model.pairs.push_back({std::move(triple.b), std::move(triple.theta), triple.rho});
    }
    return model;
}

Eigen::MatrixXd focca_transform(const FoccaModel& model, const FunctionalDataset& data) {
    require_same_basis(model.basis, data);
    const GramPair gp = gram_matrices(model.basis);
    Eigen::MatrixXd directions(model.basis.n_basis(), static_cast<Eigen::Index>(model.pairs.size()));
    for (std::size_t k = 0; k < model.pairs.size(); ++k) {
        directions.col(static_cast<Eigen::Index>(k)) = model.pairs[k].b;
    }
    return (data.coefficients.rowwise() - model.coeff_mean.transpose()) * (gp.gram * directions);
}

Eigen::MatrixXd focca_ordinal_scores(const FoccaModel& model, const OrdinalLabels& labels) {
    if (labels.max_level != model.y_mean.size()) {
        throw ValidationError("label_range", "labels disagree with the model's level count");
    }
    const Eigen::MatrixXd encoding = encode_cumulative(labels).matrix;
    Eigen::MatrixXd directions(model.y_mean.size(), static_cast<Eigen::Index>(model.pairs.size()));
    for (std::size_t k = 0; k < model.pairs.size(); ++k) {
        directions.col(static_cast<Eigen::Index>(k)) = model.pairs[k].theta;
    }
    return (encoding.rowwise() - model.y_mean.transpose()) * directions;
}

LinearReducerModel fit_fpca(const FunctionalDataset& data, double lambda, int m) {
    const int nj = data.basis.n_basis();
    if (data.n_units() < 2) throw ValidationError("too_few_units", "fit_fpca needs at least two units");
    if (lambda < 0.0) throw ValidationError("bad_lambda", "penalty must be nonnegative");
    if (m < 1 || m > nj) throw ValidationError("bad_m", "m must be in {1...n_basis}");

    auto [centered, coeff_mean] = center_columns(data.coefficients);
    const double inv_n = 1.0 / static_cast<double>(data.n_units());
    const Eigen::MatrixXd v11 = inv_n * (centered.transpose() * centered);

    const GramPair gp = gram_matrices(data.basis);
    const Eigen::MatrixXd a = gp.gram * v11 * gp.gram;
    const Eigen::MatrixXd b = gp.gram + lambda * gp.curvature;

    LinearReducerModel model{.components = {},
                             .coeff_mean = std::move(coeff_mean),
                             .lambda = lambda,
                             .m = m,
                             .kind = ReducerKind::fpca,
                             .basis = data.basis};
    for (auto& pair : gsym_eig(a, b, m)) {
        model.components.push_back({std::move(pair.vector), pair.value});
    }
    return model;
}

LinearReducerModel fit_fofd(const FunctionalDataset& data, const OrdinalLabels& labels,
                            double lambda, int m) {
    require_matching_units(data, labels);
    const int n = data.n_units();
    const int nj = data.basis.n_basis();
    if (n < 2) throw ValidationError("too_few_units", "fit_fofd needs at least two units");
    if (lambda < 0.0) throw ValidationError("bad_lambda", "penalty must be nonnegative");
    if (m < 1 || m > nj) throw ValidationError("bad_m", "m must be in {1...n_basis}");

    // per-level counts and coefficient means
    std::map<int, int> counts;
    std::map<int, Eigen::VectorXd> means;
    for (int i = 0; i < n; ++i) {
        const int c = labels.levels[static_cast<std::size_t>(i)];
        auto [it, inserted] = means.try_emplace(c, Eigen::VectorXd::Zero(nj));
        it->second += data.coefficients.row(i).transpose();
        counts[c] += 1;
    }
    for (auto& [c, sum] : means) sum /= static_cast<double>(counts[c]);

    // between: consecutive-pair scatter around the pooled mean of each pair
    Eigen::MatrixXd between = Eigen::MatrixXd::Zero(nj, nj);
    for (int c = 0; c < labels.max_level; ++c) {
        const int n_lo = counts.count(c) ? counts[c] : 0;
        const int n_hi = counts.count(c + 1) ? counts[c + 1] : 0;
        if (n_lo + n_hi == 0) continue;
        Eigen::VectorXd pooled = Eigen::VectorXd::Zero(nj);
        if (n_lo > 0) pooled += static_cast<double>(n_lo) * means[c];
        if (n_hi > 0) pooled += static_cast<double>(n_hi) * means[c + 1];
        pooled /= static_cast<double>(n_lo + n_hi);
        if (n_lo > 0) {
            const Eigen::VectorXd d = means[c] - pooled;
            between += static_cast<double>(n_lo) * d * d.transpose();
        }
        if (n_hi > 0) {
            const Eigen::VectorXd d = means[c + 1] - pooled;
            between += static_cast<double>(n_hi) * d * d.transpose();
        }
    }

    Eigen::MatrixXd within = Eigen::MatrixXd::Zero(nj, nj);
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd d =
            data.coefficients.row(i).transpose() - means[labels.levels[static_cast<std::size_t>(i)]];
        within += d * d.transpose();
    }
    within /= static_cast<double>(n);

    const GramPair gp = gram_matrices(data.basis);
    const Eigen::MatrixXd a = gp.gram * between * gp.gram;
    const Eigen::MatrixXd b = gp.gram * within * gp.gram + lambda * gp.curvature;

    auto [centered, coeff_mean] = center_columns(data.coefficients);
    LinearReducerModel model{.components = {},
                             .coeff_mean = std::move(coeff_mean),
                             .lambda = lambda,
                             .m = m,
                             .kind = ReducerKind::fofd,
                             .basis = data.basis};
    for (auto& pair : gsym_eig(a, b, m)) {
        model.components.push_back({std::move(pair.vector), pair.value});
    }
    return model;
}

LinearReducerModel fit_heuristic(const FunctionalDataset& data) {
    if (data.n_units() < 1) throw ValidationError("too_few_units", "fit_heuristic needs data");
    auto [centered, coeff_mean] = center_columns(data.coefficients);
    const Eigen::VectorXd endpoint = data.basis.evaluate(data.basis.domain().hi, 0);
    const Eigen::VectorXd scores = centered * endpoint;
    const double variance = scores.squaredNorm() / static_cast<double>(data.n_units());

    LinearReducerModel model{.components = {},
                             .coeff_mean = std::move(coeff_mean),
                             .lambda = 0.0,
                             .m = 1,
                             .kind = ReducerKind::heuristic,
                             .basis = data.basis};
    model.components.push_back({endpoint, variance});
    return model;
}

Eigen::MatrixXd linear_transform(const LinearReducerModel& model, const FunctionalDataset& data) {
    require_same_basis(model.basis, data);
    Eigen::MatrixXd directions(model.basis.n_basis(),
                               static_cast<Eigen::Index>(model.components.size()));
    for (std::size_t k = 0; k < model.components.size(); ++k) {
        directions.col(static_cast<Eigen::Index>(k)) = model.components[k].b;
    }
    if (model.kind != ReducerKind::heuristic) {
        directions = (gram_matrices(model.basis).gram * directions).eval();
    }
    return (data.coefficients.rowwise() - model.coeff_mean.transpose()) * directions;
}

FittedReducer FittedReducer::fit(const ReducerSpec& spec, const FunctionalDataset& data,
                                 const OrdinalLabels& labels) {
    switch (spec.kind) {
        case ReducerKind::focca:
            return FittedReducer(fit_focca(data, labels, spec.lambda1, spec.lambda2, spec.m));
        case ReducerKind::fpca:
            return FittedReducer(fit_fpca(data, spec.lambda, spec.m));
        case ReducerKind::fofd:
            return FittedReducer(fit_fofd(data, labels, spec.lambda, spec.m));
        case ReducerKind::heuristic:
            return FittedReducer(fit_heuristic(data));
    }
    throw ValidationError("bad_method", "unknown reducer kind");
}

Eigen::MatrixXd FittedReducer::transform(const FunctionalDataset& data) const {
    if (const auto* focca = std::get_if<FoccaModel>(&model_)) {
        return focca_transform(*focca, data);
    }
    return linear_transform(std::get<LinearReducerModel>(model_), data);
}

ReducerKind FittedReducer::kind() const {
    if (std::holds_alternative<FoccaModel>(model_)) return ReducerKind::focca;
    return std::get<LinearReducerModel>(model_).kind;
}

}  // namespace ordifun
