#pragma once

#include <vector>

#include <Eigen/Core>

namespace dal {

using ActionSet = std::vector<Eigen::VectorXd>;

// One round's context. `context` stays null for non-contextual problems;
// `context_id` indexes a finite context pool when one exists.
struct StepContext {
    int context_id = 0;
    const Eigen::VectorXd* context = nullptr;
};

}  // namespace dal
