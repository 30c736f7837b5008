#pragma once

#include <functional>

#include "manip/tensor.hpp"

namespace manip {

/// Central finite difference of a matrix-valued function along coordinate j.
Matrix central_diff(const std::function<Matrix(const Vector&)>& f, const Vector& q, int j,
                    double step);

/// Central finite difference along an arbitrary direction.
Matrix central_diff_dir(const std::function<Matrix(const Vector&)>& f, const Vector& q,
                        const Vector& dir, double step);

/// Central finite difference of a scalar function along coordinate j.
double central_diff_scalar(const std::function<double(const Vector&)>& f, const Vector& q, int j,
                           double step);

}  // namespace manip
