#include "ssar/losses/mmd.hpp"

#include <cmath>
#include <stdexcept>

#include "ssar/numerics/kernels.hpp"

namespace ssar {

Var mmd_squared(Tape& tape, Var a, Var b, double bandwidth) {
    const Matrix& va = tape.value(a);
    const Matrix& vb = tape.value(b);
    if (va.rows() == 0 || vb.rows() == 0) throw std::invalid_argument("mmd_squared: empty set");
    if (va.cols() != vb.cols()) throw std::invalid_argument("mmd_squared: feature dimension mismatch");
    const Var kaa = tape.mean(tape.rbf_gram(a, a, bandwidth));
    const Var kbb = tape.mean(tape.rbf_gram(b, b, bandwidth));
    const Var kab = tape.mean(tape.rbf_gram(a, b, bandwidth));
    // relu clips the round-off negatives of the V-statistic to 0.
    return tape.relu(tape.sub(tape.add(kaa, kbb), tape.scale(kab, 2.0)));
}

double mmd_squared(const Matrix& a, const Matrix& b, double bandwidth) {
    Tape tape;
    return tape.scalar(mmd_squared(tape, tape.constant(a), tape.constant(b), bandwidth));
}

double BandwidthPolicy::resolve(const Matrix& a, const Matrix& b) const {
    if (!median_heuristic) {
        if (!(fixed > 0.0)) throw std::invalid_argument("bandwidth: fixed value must be > 0");
        return fixed;
    }
    Matrix both(a.rows() + b.rows(), a.cols());
    both << a, b;
    if (both.rows() < 2) return 1.0;
    try {
        return median_heuristic_bandwidth(both);
    } catch (const std::invalid_argument&) {
        double sum = 0.0;
        std::size_t pairs = 0;
        for (Eigen::Index i = 0; i < both.rows(); ++i) {
            for (Eigen::Index j = i + 1; j < both.rows(); ++j) {
                sum += (both.row(i) - both.row(j)).squaredNorm();
                ++pairs;
            }
        }
        const double mean = sum / static_cast<double>(pairs);
        return mean > 0.0 ? std::sqrt(mean / 2.0) : 1.0;
    }
}

}  // namespace ssar
