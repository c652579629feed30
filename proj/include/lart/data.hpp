#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace lart {

struct Violation {
  int row = -1;  // subject index, -1 if not cell-specific
  int col = -1;  // item index, -1 if not cell-specific
  std::string reason;
};

// Observed matrices: binary correctness R and positive CoT lengths T.
// An empty mask means every entry is observed; otherwise mask(i,j) != 0
// marks (i,j) as observed.
struct ResponseDataset {
  int n_subjects = 0;
  int n_items = 0;
  std::vector<std::string> subject_ids;
  std::vector<std::string> item_ids;
  Eigen::MatrixXi R;
  Eigen::MatrixXd T;
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> mask;

  bool has_mask() const { return mask.size() > 0; }
  bool observed(int i, int j) const { return !has_mask() || mask(i, j) != 0; }
  bool complete() const;
  Eigen::MatrixXd log_T() const;  // log of T entrywise (unobserved cells -> 0)
};

std::vector<Violation> validate(const ResponseDataset& data);

}  // namespace lart
