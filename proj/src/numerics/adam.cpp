#include "ssar/numerics/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace ssar {

AdamState AdamState::zeros_like(std::span<const Matrix> params, AdamHyper hyper) {
    AdamState s;
    s.hyper = hyper;
    for (const Matrix& p : params) {
        s.first_moment.push_back(Matrix::Zero(p.rows(), p.cols()));
        s.second_moment.push_back(Matrix::Zero(p.rows(), p.cols()));
    }
    return s;
}

void adam_step(std::span<Matrix> params, std::span<const Matrix> grads, AdamState& state,
               std::span<const std::string> names, const std::vector<bool>& update_mask) {
    if (params.size() != grads.size() || params.size() != state.first_moment.size() ||
        params.size() != state.second_moment.size()) {
        throw std::invalid_argument("adam_step: parameter/gradient/state block counts differ");
    }
    auto label = [&](std::size_t i) {
        return i < names.size() ? names[i] : "block " + std::to_string(i);
    };
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].rows() != grads[i].rows() || params[i].cols() != grads[i].cols() ||
            params[i].rows() != state.first_moment[i].rows() ||
            params[i].cols() != state.first_moment[i].cols()) {
            throw std::invalid_argument("adam_step: shape mismatch in " + label(i));
        }
        if (!all_finite(grads[i])) {
            throw std::invalid_argument("adam_step: non-finite gradient in " + label(i));
        }
    }

    const AdamHyper& h = state.hyper;
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double bc1 = 1.0 - std::pow(h.beta1, t);
    const double bc2 = 1.0 - std::pow(h.beta2, t);

    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!update_mask.empty() && !update_mask[i]) continue;
        Matrix& p = params[i];
        Matrix& m = state.first_moment[i];
        Matrix& v = state.second_moment[i];
        const Matrix g = grads[i] + h.weight_decay * p;
        m = h.beta1 * m + (1.0 - h.beta1) * g;
        v = h.beta2 * v + (1.0 - h.beta2) * g.cwiseProduct(g);
        const auto m_hat = m.array() / bc1;
        const auto v_hat = v.array() / bc2;
        p.array() -= h.lr * m_hat / (v_hat.sqrt() + h.eps);
    }
}

}  // namespace ssar
