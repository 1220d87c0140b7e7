#include "dlsc/hmm.hpp"

#include <cmath>
#include <limits>

#include "dlsc/errors.hpp"

namespace dlsc {

namespace {

void check_shapes(const ChainLogWeights& w)
{
    const auto G = w.log_init.size();
    if (G == 0 || w.log_trans.rows() != G || w.log_trans.cols() != G || w.log_emit.rows() != G ||
        w.log_emit.cols() == 0) {
        throw InvalidInput("chain weights have inconsistent shapes");
    }
}

// Scale a vector of log values to weights with max 1; returns the shift.
double exp_shift(const Eigen::VectorXd& logv, Eigen::VectorXd& out)
{
    const double m = logv.maxCoeff();
    if (!std::isfinite(m)) {
        out.setZero(logv.size());
        return m;
    }
    out = (logv.array() - m).exp();
    return m;
}

} // namespace

// Scaled forward pass: alpha_t is kept normalized and the log scale
// factors accumulate into the normalizer.
double chain_log_normalizer(const ChainLogWeights& w)
{
    check_shapes(w);
    const auto T = w.log_emit.cols();
    Eigen::VectorXd alpha;
    double log_c = exp_shift(w.log_init + w.log_emit.col(0), alpha);
    if (!std::isfinite(log_c)) return -std::numeric_limits<double>::infinity();
    double s = alpha.sum();
    log_c += std::log(s);
    alpha /= s;

    Eigen::MatrixXd trans;
    const double trans_shift = w.log_trans.maxCoeff();
    trans = (w.log_trans.array() - trans_shift).exp();
    Eigen::VectorXd emit;
    for (Eigen::Index t = 1; t < T; ++t) {
        const double emit_shift = exp_shift(w.log_emit.col(t), emit);
        Eigen::VectorXd next = (trans.transpose() * alpha).cwiseProduct(emit);
        s = next.sum();
        if (!(s > 0.0)) return -std::numeric_limits<double>::infinity();
        log_c += trans_shift + emit_shift + std::log(s);
        alpha = next / s;
    }
    return log_c;
}

ChainPosterior forward_backward(const ChainLogWeights& w)
{
    check_shapes(w);
    const auto G = w.log_init.size();
    const auto T = w.log_emit.cols();
    const double trans_shift = w.log_trans.maxCoeff();
    const Eigen::MatrixXd trans = (w.log_trans.array() - trans_shift).exp();

    Eigen::MatrixXd emit(G, T);
    Eigen::VectorXd emit_shift(T);
    for (Eigen::Index t = 0; t < T; ++t) {
        Eigen::VectorXd col;
        emit_shift(t) = exp_shift(w.log_emit.col(t), col);
        emit.col(t) = col;
    }

    Eigen::MatrixXd alpha(G, T);
    Eigen::VectorXd scale(T);
    Eigen::VectorXd init;
    const double init_shift = exp_shift(w.log_init, init);
    alpha.col(0) = init.cwiseProduct(emit.col(0));
    scale(0) = alpha.col(0).sum();
    if (!(scale(0) > 0.0)) throw NumericalError("chain has zero total weight");
    alpha.col(0) /= scale(0);
    for (Eigen::Index t = 1; t < T; ++t) {
        alpha.col(t) = (trans.transpose() * alpha.col(t - 1)).cwiseProduct(emit.col(t));
        scale(t) = alpha.col(t).sum();
        if (!(scale(t) > 0.0)) throw NumericalError("chain has zero total weight");
        alpha.col(t) /= scale(t);
    }

    Eigen::MatrixXd beta(G, T);
    beta.col(T - 1).setOnes();
    for (Eigen::Index t = T - 2; t >= 0; --t) {
        beta.col(t) = trans * emit.col(t + 1).cwiseProduct(beta.col(t + 1)) / scale(t + 1);
    }

    ChainPosterior out;
    out.marginals = alpha.cwiseProduct(beta);
    for (Eigen::Index t = 0; t < T; ++t) out.marginals.col(t) /= out.marginals.col(t).sum();
    out.pairwise.reserve(T > 0 ? T - 1 : 0);
    for (Eigen::Index t = 0; t + 1 < T; ++t) {
        Eigen::MatrixXd xi = alpha.col(t).asDiagonal() * trans *
                             emit.col(t + 1).cwiseProduct(beta.col(t + 1)).asDiagonal();
        xi /= xi.sum();
        out.pairwise.push_back(std::move(xi));
    }
    out.log_normalizer = init_shift + emit_shift.sum() + static_cast<double>(T - 1) * trans_shift +
                         scale.array().log().sum();
    return out;
}

Eigen::VectorXi sample_chain(const ChainLogWeights& w, RngStream& rng)
{
    check_shapes(w);
    const auto G = w.log_init.size();
    const auto T = w.log_emit.cols();
    const double trans_shift = w.log_trans.maxCoeff();
    const Eigen::MatrixXd trans = (w.log_trans.array() - trans_shift).exp();
    auto pick = [&rng](const Eigen::VectorXd& weights) {
        double u = rng.uniform() * weights.sum();
        for (Eigen::Index k = 0; k < weights.size(); ++k) {
            u -= weights(k);
            if (u <= 0.0) return static_cast<int>(k);
        }
        return static_cast<int>(weights.size() - 1);
    };

    Eigen::MatrixXd alpha(G, T);
    Eigen::VectorXd col;
    exp_shift(w.log_init + w.log_emit.col(0), col);
    if (!(col.sum() > 0.0)) throw NumericalError("chain has zero total weight");
    alpha.col(0) = col / col.sum();
    for (Eigen::Index t = 1; t < T; ++t) {
        exp_shift(w.log_emit.col(t), col);
        Eigen::VectorXd next = (trans.transpose() * alpha.col(t - 1)).cwiseProduct(col);
        const double s = next.sum();
        if (!(s > 0.0)) throw NumericalError("chain has zero total weight");
        alpha.col(t) = next / s;
    }
    Eigen::VectorXi z(T);
    z(T - 1) = pick(alpha.col(T - 1));
    for (Eigen::Index t = T - 2; t >= 0; --t) {
        z(t) = pick(alpha.col(t).cwiseProduct(trans.col(z(t + 1))));
    }
    return z;
}

} // namespace dlsc
