#pragma once

#include <Eigen/Dense>
#include <vector>

namespace topiclens {

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method, O(n^3)).
/// Returns col[i], the column matched to row i.
std::vector<std::size_t> min_cost_assignment(const Eigen::MatrixXd& cost);

}  // namespace topiclens
