#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "volpot/kernel.hpp"
#include "volpot/mesh.hpp"
#include "volpot/summation.hpp"

namespace volpot {

// Interpolation nodes of every cell in mesh order: p(p+1)/2 per triangle,
// p^2 per box.  This is the dof layout the operator samples f on and the
// layout solution values are interpolated from.
std::vector<Vec2> mesh_nodes(const HybridMesh& mesh, int p);

inline int mesh_dof_count(const HybridMesh& mesh, int p) {
    return mesh.n_tri * (p * (p + 1) / 2) + mesh.n_box * (p * p);
}

struct OperatorStats {
    int ndofs = 0;
    int nsrcs = 0;
    long long correction_blocks = 0;  // nonzero (target, cell) pairs
    long long correction_nnz = 0;     // total stored row entries
    double build_seconds = 0;
};

struct ApplyTimings {
    double smooth_seconds = 0;
    double correction_seconds = 0;
};

// Volume potential V[f] evaluated at a fixed registered target set: a
// global sum over the oversampled smooth sources plus sparse local
// corrections that replace the smooth contribution of each target's self
// and near cells.  Targets that coincide bitwise with mesh nodes share
// per-reference-node machinery; other targets get their own rules.
class VolumePotentialOperator {
  public:
    VolumePotentialOperator(const HybridMesh& mesh, const Kernel& kernel,
                            int p, int q, std::vector<Vec2> targets,
                            double epsilon = 1e-12);
    ~VolumePotentialOperator();
    VolumePotentialOperator(VolumePotentialOperator&&) noexcept;
    VolumePotentialOperator& operator=(VolumePotentialOperator&&) noexcept;

    // f sampled at mesh_nodes(mesh, p); returns potentials at the
    // registered targets, in registration order.
    std::vector<double> apply(const std::vector<double>& f_samples,
                              ApplyTimings* timings = nullptr) const;

    // Order-p interpolation of per-node values (f, or a solved u) at query
    // points; throws if a point is in no cell.
    double interpolate_solution(const std::vector<double>& node_values,
                                Vec2 pt) const;
    std::vector<double> interpolate_solution(
        const std::vector<double>& node_values,
        const std::vector<Vec2>& pts) const;

    // Slow path for targets not registered at build time: pairwise smooth
    // sum plus corrections assembled on demand.
    std::vector<double> evaluate_at(const std::vector<double>& f_samples,
                                    const std::vector<Vec2>& pts) const;

    const std::vector<Vec2>& nodes() const;
    const std::vector<Vec2>& targets() const;
    int ndofs() const;
    int nsrcs() const;
    const OperatorStats& stats() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

VolumePotentialOperator build_operator(const HybridMesh& mesh,
                                       const Kernel& kernel, int p, int q,
                                       std::vector<Vec2> targets,
                                       double epsilon = 1e-12);

}  // namespace volpot
