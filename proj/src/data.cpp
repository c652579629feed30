#include "lart/data.hpp"

#include <cmath>
#include <unordered_set>

namespace lart {

bool ResponseDataset::complete() const {
  if (!has_mask()) return true;
  for (int i = 0; i < n_subjects; ++i)
    for (int j = 0; j < n_items; ++j)
      if (mask(i, j) == 0) return false;
  return true;
}

Eigen::MatrixXd ResponseDataset::log_T() const {
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n_subjects, n_items);
  for (int i = 0; i < n_subjects; ++i)
    for (int j = 0; j < n_items; ++j)
      if (observed(i, j)) L(i, j) = std::log(T(i, j));
  return L;
}

std::vector<Violation> validate(const ResponseDataset& data) {
  std::vector<Violation> out;
  const int n = data.n_subjects, j = data.n_items;
  if (n <= 0) out.push_back({-1, -1, "n_subjects must be positive"});
  if (j <= 0) out.push_back({-1, -1, "n_items must be positive"});
  if (static_cast<int>(data.subject_ids.size()) != n)
    out.push_back({-1, -1, "subject_ids length does not match n_subjects"});
  if (static_cast<int>(data.item_ids.size()) != j)
    out.push_back({-1, -1, "item_ids length does not match n_items"});
  if (data.R.rows() != n || data.R.cols() != j)
    out.push_back({-1, -1, "R has wrong dimensions"});
  if (data.T.rows() != n || data.T.cols() != j)
    out.push_back({-1, -1, "T has wrong dimensions"});
  if (data.has_mask() && (data.mask.rows() != n || data.mask.cols() != j))
    out.push_back({-1, -1, "mask has wrong dimensions"});
  if (!out.empty()) return out;

  std::unordered_set<std::string> seen;
  for (int i = 0; i < n; ++i)
    if (!seen.insert(data.subject_ids[i]).second)
      out.push_back({i, -1, "duplicate subject_id: " + data.subject_ids[i]});
  seen.clear();
  for (int k = 0; k < j; ++k)
    if (!seen.insert(data.item_ids[k]).second)
      out.push_back({-1, k, "duplicate item_id: " + data.item_ids[k]});

  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < j; ++k) {
      if (!data.observed(i, k)) continue;
      const int r = data.R(i, k);
      if (r != 0 && r != 1) out.push_back({i, k, "R entry not in {0,1}"});
      const double t = data.T(i, k);
      if (!(t >= 1.0) || !std::isfinite(t))
        out.push_back({i, k, "T entry must be a finite value >= 1"});
    }
  }
  return out;
}

}  // namespace lart
