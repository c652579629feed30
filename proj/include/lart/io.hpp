#pragma once

#include <string>

#include "lart/data.hpp"
#include "lart/params.hpp"

namespace lart {

struct FitMeta {
  std::uint64_t seed = 0;
  int iters = 0;
  double tol = 0.0;
  bool converged = false;
  std::string timestamp;  // empty unless supplied (keeps outputs byte-stable)
  std::string data_digest;
};

struct ModelFile {
  int format_version = 1;
  PopulationParams params;
  std::vector<std::string> item_ids;
  FitMeta meta;
};

// Long-format CSV with header `subject_id,item_id,correct,cot_length`.
// Missing (subject, item) pairs become masked cells.
ResponseDataset load_dataset(const std::string& path);
void save_dataset(const ResponseDataset& data, const std::string& path);

// Canonical JSON: UTF-8, sorted keys, 17-significant-digit floats, so that
// load(save(x)) round-trips every double bit-exactly.
void save_model(const ModelFile& model, const std::string& path);
ModelFile load_model(const std::string& path);

// FNV-1a hash over the canonical dataset serialization, as a hex string.
std::string data_digest(const ResponseDataset& data);

// 17-significant-digit representation that parses back to the same double.
std::string format_double(double x);

}  // namespace lart
