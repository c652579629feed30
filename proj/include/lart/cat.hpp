#pragma once

#include <string>
#include <vector>

#include "lart/params.hpp"
#include "lart/traits.hpp"

namespace lart {

// Adaptive-testing session for one subject. Item selection maximizes the
// accuracy-side Fisher information at the current theta estimate; the CoT
// side refines the estimate but contributes no item-dependent selection term.
struct CatSession {
  std::string subject_id;
  const PopulationParams* pool = nullptr;
  std::vector<int> administered;
  std::vector<std::pair<int, double>> responses;  // (R, log T) per administered
  std::vector<std::uint8_t> available;            // per pool item
  TraitEstimate current;
  double ci_level = 0.95;
};

CatSession start_session(const PopulationParams& params,
                         const std::vector<int>& initial_items,
                         const std::vector<std::pair<int, double>>& responses,
                         const std::string& subject_id = "",
                         double ci_level = 0.95);

// Accuracy information contributed by one item at ability theta.
double item_information(const PopulationParams& params, int j, double theta);

// Argmax of item_information over available items; ties broken by smallest
// index. Throws std::runtime_error if the pool is exhausted.
int select_next_item(const CatSession& session);

// Appends a response, removes the item from the pool, refits the estimate.
void record_response(CatSession& session, int item, int r, double log_t);

}  // namespace lart
