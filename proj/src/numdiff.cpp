#include "manip/numdiff.hpp"

namespace manip {

Matrix central_diff(const std::function<Matrix(const Vector&)>& f, const Vector& q, int j,
                    double step) {
    Vector qp = q, qm = q;
    qp(j) += step;
    qm(j) -= step;
    return (f(qp) - f(qm)) / (2.0 * step);
}

Matrix central_diff_dir(const std::function<Matrix(const Vector&)>& f, const Vector& q,
                        const Vector& dir, double step) {
    return (f(q + step * dir) - f(q - step * dir)) / (2.0 * step);
}

double central_diff_scalar(const std::function<double(const Vector&)>& f, const Vector& q, int j,
                           double step) {
    Vector qp = q, qm = q;
    qp(j) += step;
    qm(j) -= step;
    return (f(qp) - f(qm)) / (2.0 * step);
}

}  // namespace manip
