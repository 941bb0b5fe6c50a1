#pragma once

#include <Eigen/Core>

namespace retcore {

// Row-major throughout: tensors serialize row-major and the forward pass
// walks rows, so this keeps memory order and file order identical.
template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using MatF = Mat<float>;
using MatD = Mat<double>;

}  // namespace retcore
