#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "volpot/common.hpp"
#include "volpot/kernel.hpp"

namespace volpot {

// Point charges for the smooth global sum.  Charges are the f-values folded
// with jacobians and smooth quadrature weights, so signs are arbitrary.
struct SourceSet {
    std::vector<Vec2> points;
    std::vector<double> charges;
};

// Exact pairwise reference evaluator, plain double loop in index order.
// A target coinciding with a source throws std::invalid_argument naming
// both indices.
std::vector<double> direct_sum(const Kernel& kernel, const SourceSet& sources,
                               const std::vector<Vec2>& targets);

// Fast evaluator bound to a fixed source/target geometry.  Building the
// plan does all the kernel-independent work (tree, neighbor and interaction
// lists); apply() runs the passes for one charge vector.  Laplace uses a
// uniform quadtree multipole scheme; modified Helmholtz a treecode with
// tensor Chebyshev proxy charges per box.  Either way the result matches
// direct_sum to relative l2 error <= epsilon.
//
// apply() is const and safe to call concurrently with distinct charge
// vectors.  Results are byte-identical for any thread count.
class SummationPlan {
  public:
    SummationPlan(const Kernel& kernel, std::vector<Vec2> sources,
                  std::vector<Vec2> targets, double epsilon = 1e-12);
    ~SummationPlan();
    SummationPlan(SummationPlan&&) noexcept;
    SummationPlan& operator=(SummationPlan&&) noexcept;

    std::vector<double> apply(const std::vector<double>& charges) const;

    std::size_t num_sources() const;
    std::size_t num_targets() const;
    // Tree depth (0 when the plan fell back to pairwise summation).
    int levels() const;
    // Laplace: multipole truncation order.  Modified Helmholtz: Chebyshev
    // nodes per axis.  0 in pairwise fallback mode.
    int expansion_order() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// One-shot convenience: build a plan and apply the charges in `sources`.
std::vector<double> accelerated_sum(const Kernel& kernel,
                                    const SourceSet& sources,
                                    const std::vector<Vec2>& targets,
                                    double epsilon = 1e-12);

}  // namespace volpot
