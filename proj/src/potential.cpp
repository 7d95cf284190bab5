#include "volpot/potential.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <unordered_map>
#include <utility>

#include "volpot/basis.hpp"
#include "volpot/common.hpp"
#include "volpot/singular.hpp"

namespace volpot {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

// parallel_for runs fn on raw worker threads, so an escaping exception would
// terminate the process.  Capture the first failure and rethrow it here.
template <typename F>
void parallel_try(std::int64_t n, F&& fn) {
    std::mutex mtx;
    std::string what;
    std::atomic<bool> failed(false);
    parallel_for(n, [&](std::int64_t i) {
        if (failed.load(std::memory_order_relaxed)) return;
        try {
            fn(i);
        } catch (const std::exception& e) {
            failed.store(true, std::memory_order_relaxed);
            std::lock_guard<std::mutex> lock(mtx);
            if (what.empty()) what = e.what();
        }
    });
    if (failed.load()) throw std::runtime_error(what);
}

std::uint64_t double_bits(double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, sizeof u);
    return u;
}

std::uint64_t point_key(Vec2 p) {
    // splitmix-style combine of the two raw bit patterns
    std::uint64_t h = double_bits(p.x) + 0x9e3779b97f4a7c15ull;
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
    h ^= double_bits(p.y) + 0x9e3779b97f4a7c15ull;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
    return h ^ (h >> 31);
}

}  // namespace

std::vector<Vec2> mesh_nodes(const HybridMesh& mesh, int p) {
    const TriangleBasisTable& tri = triangle_table(p);
    const BoxBasisTable& box = box_table(p);
    std::vector<Vec2> out;
    out.reserve(static_cast<size_t>(mesh_dof_count(mesh, p)));
    for (const Cell& cell : mesh.cells) {
        const Eigen::MatrixX2d& nodes =
            cell.type == CellType::Box ? box.nodes : tri.nodes;
        for (Eigen::Index i = 0; i < nodes.rows(); ++i)
            out.push_back(cell.map({nodes(i, 0), nodes(i, 1)}));
    }
    return out;
}

struct VolumePotentialOperator::Impl {
    const HybridMesh* mesh = nullptr;
    Kernel kernel;
    int p = 0, q = 0;
    double epsilon = 1e-12;

    const TriangleBasisTable* ttab = nullptr;
    const BoxBasisTable* btab = nullptr;
    const TriangleSourceRule* tsrc = nullptr;
    const BoxSourceRule* bsrc = nullptr;
    const Eigen::MatrixXd* tover = nullptr;  // p nodes -> q source nodes
    const Eigen::MatrixXd* bover = nullptr;
    int np_tri = 0, np_box = 0;
    int nq_tri = 0, nq_box = 0;

    std::vector<Vec2> nodes;     // dof layout of mesh_nodes(mesh, p)
    std::vector<int> node_off;   // per cell, into nodes / f_samples
    std::vector<int> node_cell;  // per node
    std::vector<Vec2> targets;

    std::vector<int> src_off;    // per cell, into the source layout
    std::vector<Vec2> src_pts;
    std::vector<double> src_wj;  // quadrature weight times jacobian

    // Sparse value-space corrections grouped by target.  Rows live in a
    // shared pool: translation-invariant box lattice rows are stored once
    // and referenced by every (target, cell) pair they serve.
    struct Block {
        int cell = 0;
        int pool = 0;
    };
    std::vector<int> blk_off;
    std::vector<Block> blocks;
    std::vector<Eigen::RowVectorXd> pool;

    std::unique_ptr<SummationPlan> plan;
    OperatorStats stats;

    int cell_node_count(const Cell& c) const {
        return c.type == CellType::Box ? np_box : np_tri;
    }
    const Eigen::MatrixXd& coeff_map(const Cell& c) const {
        return c.type == CellType::Box ? btab->C : ttab->C;
    }

    void build(std::vector<Vec2> tgts);
    void build_sources();
    void build_corrections();
    void build_charges(const std::vector<double>& f,
                       std::vector<double>& charges) const;
    Eigen::RowVectorXd correction_row_generic(const Cell& cell, Vec2 pt,
                                              bool is_self) const;
};

void VolumePotentialOperator::Impl::build_sources() {
    src_off.assign(mesh->cells.size() + 1, 0);
    for (size_t c = 0; c < mesh->cells.size(); ++c)
        src_off[c + 1] = src_off[c] +
                         (mesh->cells[c].type == CellType::Box ? nq_box : nq_tri);
    const int nsrcs = src_off.back();
    src_pts.resize(static_cast<size_t>(nsrcs));
    src_wj.resize(static_cast<size_t>(nsrcs));
    parallel_try(static_cast<std::int64_t>(mesh->cells.size()), [&](std::int64_t c) {
        const Cell& cell = mesh->cells[static_cast<size_t>(c)];
        const bool box = cell.type == CellType::Box;
        const Eigen::MatrixX2d& zn = box ? bsrc->nodes : tsrc->nodes;
        const Eigen::VectorXd& w = box ? bsrc->w : tsrc->w;
        int at = src_off[static_cast<size_t>(c)];
        for (Eigen::Index s = 0; s < zn.rows(); ++s, ++at) {
            const Vec2 zeta{zn(s, 0), zn(s, 1)};
            src_pts[static_cast<size_t>(at)] = cell.map(zeta);
            src_wj[static_cast<size_t>(at)] = w[s] * cell.jacobian(zeta);
        }
    });
}

void VolumePotentialOperator::Impl::build_corrections() {
    const int nt = static_cast<int>(targets.size());
    const double h = mesh->h;

    // Node-coincident targets share per-reference-node machinery; detect
    // them by exact bit equality (the node list is the caller's handle, so
    // a node-derived target reproduces the same doubles).
    std::unordered_multimap<std::uint64_t, int> node_lookup;
    node_lookup.reserve(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i)
        node_lookup.emplace(point_key(nodes[i]), static_cast<int>(i));
    auto find_node = [&](Vec2 pt) -> int {
        auto [lo, hi] = node_lookup.equal_range(point_key(pt));
        for (auto it = lo; it != hi; ++it) {
            const Vec2 n = nodes[static_cast<size_t>(it->second)];
            if (double_bits(n.x) == double_bits(pt.x) &&
                double_bits(n.y) == double_bits(pt.y))
                return it->second;
        }
        return -1;
    };

    std::vector<TargetClassification> cls(static_cast<size_t>(nt));
    parallel_try(nt, [&](std::int64_t i) {
        try {
            cls[static_cast<size_t>(i)] = classify_target(*mesh, targets[static_cast<size_t>(i)]);
        } catch (const std::exception& e) {
            throw std::invalid_argument("target " + std::to_string(i) + " at (" +
                                        std::to_string(targets[static_cast<size_t>(i)].x) + ", " +
                                        std::to_string(targets[static_cast<size_t>(i)].y) +
                                        "): " + e.what());
        }
    });

    enum class Job { TriSelfNode, TriNearSnap, BoxLattice, SelfGeneric, NearGeneric };
    struct Task {
        Job job;
        int target = 0, cell = 0;
        int local = -1;       // reference node index for the amortized jobs
        int offset_idx = -1;  // (oy+2)*5 + (ox+2) for BoxLattice
        int pool = -1;
    };
    std::vector<Task> tasks;

    // A box pair rides the lattice table when both cells are grid boxes of
    // the mesh size and their centers differ by an exact small multiple of h.
    auto lattice_offset = [&](const Cell& tgt_cell, const Cell& src_cell) -> int {
        if (tgt_cell.h != h || src_cell.h != h) return -1;
        const double fx = (tgt_cell.center.x - src_cell.center.x) / h;
        const double fy = (tgt_cell.center.y - src_cell.center.y) / h;
        const double rx = std::round(fx), ry = std::round(fy);
        if (std::abs(fx - rx) > 1e-9 || std::abs(fy - ry) > 1e-9) return -1;
        if (std::abs(rx) > 2 || std::abs(ry) > 2) return -1;
        return (static_cast<int>(ry) + 2) * 5 + (static_cast<int>(rx) + 2);
    };

    blk_off.assign(static_cast<size_t>(nt) + 1, 0);
    for (int t = 0; t < nt; ++t) {
        const TargetClassification& tc = cls[static_cast<size_t>(t)];
        const int nid = find_node(targets[static_cast<size_t>(t)]);
        const Cell* node_home =
            nid >= 0 ? &mesh->cells[static_cast<size_t>(node_cell[static_cast<size_t>(nid)])] : nullptr;
        const int local =
            nid >= 0 ? nid - node_off[static_cast<size_t>(node_cell[static_cast<size_t>(nid)])] : -1;

        auto add = [&](int cell_id, bool is_self) {
            const Cell& cell = mesh->cells[static_cast<size_t>(cell_id)];
            Task task;
            task.target = t;
            task.cell = cell_id;
            if (cell.type == CellType::Box) {
                const int off = node_home && node_home->type == CellType::Box &&
                                        node_cell[static_cast<size_t>(nid)] ==
                                            (is_self ? cell_id : node_cell[static_cast<size_t>(nid)])
                                    ? lattice_offset(*node_home, cell)
                                    : -1;
                if (off >= 0) {
                    task.job = Job::BoxLattice;
                    task.local = local;
                    task.offset_idx = off;
                } else {
                    task.job = is_self ? Job::SelfGeneric : Job::NearGeneric;
                }
            } else if (is_self) {
                if (nid >= 0 && node_cell[static_cast<size_t>(nid)] == cell_id) {
                    task.job = Job::TriSelfNode;
                    task.local = local;
                } else {
                    task.job = Job::SelfGeneric;
                }
            } else {
                task.job = Job::TriNearSnap;
            }
            tasks.push_back(task);
        };

        add(tc.self, true);
        for (int c : tc.near_cells) add(c, false);
        blk_off[static_cast<size_t>(t) + 1] = static_cast<int>(tasks.size());
    }

    // Assign pool slots: shared lattice rows keyed by (offset, node), a
    // private row for everything else.
    std::unordered_map<int, int> lattice_slot;
    for (Task& task : tasks) {
        if (task.job == Job::BoxLattice) {
            const int key = task.offset_idx * 256 + task.local;
            auto [it, fresh] = lattice_slot.emplace(key, static_cast<int>(pool.size()));
            if (fresh) pool.emplace_back();
            task.pool = it->second;
        } else {
            task.pool = static_cast<int>(pool.size());
            pool.emplace_back();
        }
    }

    // Shared lattice rows: accurate stencil rows minus the smooth rule on a
    // canonical origin box, both translation invariant on the uniform grid.
    if (!lattice_slot.empty()) {
        const std::vector<Eigen::MatrixXd> table = box_correction_table(p, kernel, h);
        Cell origin;
        origin.type = CellType::Box;
        origin.center = {0, 0};
        origin.h = h;
        std::vector<std::pair<int, int>> entries(lattice_slot.begin(), lattice_slot.end());
        parallel_try(static_cast<std::int64_t>(entries.size()), [&](std::int64_t e) {
            const int key = entries[static_cast<size_t>(e)].first;
            const int idx = key / 256, j = key % 256;
            const int ox = idx % 5 - 2, oy = idx / 5 - 2;
            const Vec2 pt{ox * h + 0.5 * h * btab->nodes(j, 0),
                          oy * h + 0.5 * h * btab->nodes(j, 1)};
            const Eigen::VectorXd acc = table[static_cast<size_t>(idx)].row(j).transpose();
            const Eigen::VectorXd sm = smooth_potential_row(origin, p, q, pt, kernel);
            pool[static_cast<size_t>(entries[static_cast<size_t>(e)].second)] =
                (acc - sm).transpose() * btab->C;
        });
    }

    // Split the remaining tasks: triangle self rows grouped per reference
    // node so one SingularTargetRule serves every cell, the rest generic.
    std::vector<std::vector<int>> tri_self_by_local(static_cast<size_t>(np_tri));
    std::vector<int> rest;
    for (size_t i = 0; i < tasks.size(); ++i) {
        if (tasks[i].job == Job::TriSelfNode)
            tri_self_by_local[static_cast<size_t>(tasks[i].local)].push_back(static_cast<int>(i));
        else if (tasks[i].job != Job::BoxLattice)
            rest.push_back(static_cast<int>(i));
    }

    for (int j = 0; j < np_tri; ++j) {
        const std::vector<int>& group = tri_self_by_local[static_cast<size_t>(j)];
        if (group.empty()) continue;
        const SingularTargetRule rule(RefCell::Simplex, p,
                                      {ttab->nodes(j, 0), ttab->nodes(j, 1)});
        parallel_try(static_cast<std::int64_t>(group.size()), [&](std::int64_t k) {
            const Task& task = tasks[static_cast<size_t>(group[static_cast<size_t>(k)])];
            const Cell& cell = mesh->cells[static_cast<size_t>(task.cell)];
            const Vec2 r0 = targets[static_cast<size_t>(task.target)];
            const Eigen::VectorXd acc = rule.row(cell, kernel, r0);
            const Eigen::VectorXd sm = smooth_potential_row(cell, p, q, r0, kernel);
            pool[static_cast<size_t>(task.pool)] = (acc - sm).transpose() * ttab->C;
        });
    }

    if (!rest.empty()) {
        // Warm the star-layout cache before going parallel.
        const ReferenceCorrectionTables& tables = reference_tables(p);
        parallel_try(static_cast<std::int64_t>(rest.size()), [&](std::int64_t k) {
            const Task& task = tasks[static_cast<size_t>(rest[static_cast<size_t>(k)])];
            const Cell& cell = mesh->cells[static_cast<size_t>(task.cell)];
            const Vec2 pt = targets[static_cast<size_t>(task.target)];
            Eigen::RowVectorXd row;
            if (task.job == Job::TriNearSnap) {
                const Vec2 zeta0 = cell.invert(pt);
                const Vec2 zstar = nearest_reference_point(cell, pt, nullptr);
                const double tpar =
                    nearest_boundary_param(RefCell::Simplex, zstar, nullptr);
                const Eigen::VectorXd acc = near_potential_row_on_star(
                    cell, p, pt, zeta0, nearest_star(tables, tpar), kernel);
                const Eigen::VectorXd sm = smooth_potential_row(cell, p, q, pt, kernel);
                row = (acc - sm).transpose() * ttab->C;
            } else {
                row = correction_row_generic(cell, pt, task.job == Job::SelfGeneric);
            }
            pool[static_cast<size_t>(task.pool)] = std::move(row);
        });
    }

    blocks.resize(tasks.size());
    for (size_t i = 0; i < tasks.size(); ++i)
        blocks[i] = {tasks[i].cell, tasks[i].pool};

    stats.correction_blocks = static_cast<long long>(blocks.size());
    stats.correction_nnz = 0;
    for (const Block& b : blocks)
        stats.correction_nnz += pool[static_cast<size_t>(b.pool)].size();
}

Eigen::RowVectorXd VolumePotentialOperator::Impl::correction_row_generic(
    const Cell& cell, Vec2 pt, bool is_self) const {
    const Vec2 zeta0 = cell.invert(pt);
    const Vec2 zstar = is_self ? zeta0 : nearest_reference_point(cell, pt, nullptr);
    const Eigen::VectorXd corr =
        cell_correction_row(cell, p, q, pt, zeta0, zstar, is_self, kernel);
    return corr.transpose() * coeff_map(cell);
}

void VolumePotentialOperator::Impl::build(std::vector<Vec2> tgts) {
    const auto t0 = std::chrono::steady_clock::now();
    if (p < 1 || p > 12) throw std::invalid_argument("order p out of range [1, 12]");
    if (q < 1 || q > 40) throw std::invalid_argument("source order q out of range [1, 40]");
    if (!mesh->domain || mesh->cells.empty())
        throw std::invalid_argument("potential operator needs a nonempty mesh");

    ttab = &triangle_table(p);
    btab = &box_table(p);
    tsrc = &triangle_source_rule(q);
    bsrc = &box_source_rule(q);
    tover = &triangle_oversample(p, q);
    bover = &box_oversample(p, q);
    np_tri = ttab->n;
    np_box = btab->n;
    nq_tri = static_cast<int>(tsrc->nodes.rows());
    nq_box = static_cast<int>(bsrc->nodes.rows());

    nodes = mesh_nodes(*mesh, p);
    node_off.assign(mesh->cells.size() + 1, 0);
    for (size_t c = 0; c < mesh->cells.size(); ++c)
        node_off[c + 1] = node_off[c] + cell_node_count(mesh->cells[c]);
    node_cell.resize(nodes.size());
    for (size_t c = 0; c < mesh->cells.size(); ++c)
        for (int i = node_off[c]; i < node_off[c + 1]; ++i)
            node_cell[static_cast<size_t>(i)] = static_cast<int>(c);

    targets = std::move(tgts);
    build_sources();
    build_corrections();
    plan = std::make_unique<SummationPlan>(kernel, src_pts, targets, epsilon);

    stats.ndofs = node_off.back();
    stats.nsrcs = src_off.back();
    stats.build_seconds = seconds_since(t0);
}

void VolumePotentialOperator::Impl::build_charges(const std::vector<double>& f,
                                                  std::vector<double>& charges) const {
    charges.resize(src_pts.size());
    parallel_try(static_cast<std::int64_t>(mesh->cells.size()), [&](std::int64_t c) {
        const Cell& cell = mesh->cells[static_cast<size_t>(c)];
        const bool box = cell.type == CellType::Box;
        const Eigen::MatrixXd& over = box ? *bover : *tover;
        const Eigen::Map<const Eigen::VectorXd> fc(
            f.data() + node_off[static_cast<size_t>(c)], box ? np_box : np_tri);
        const Eigen::VectorXd fs = over * fc;
        const int base = src_off[static_cast<size_t>(c)];
        for (Eigen::Index s = 0; s < fs.size(); ++s)
            charges[static_cast<size_t>(base + s)] =
                src_wj[static_cast<size_t>(base + s)] * fs[s];
    });
}

VolumePotentialOperator::VolumePotentialOperator(const HybridMesh& mesh,
                                                 const Kernel& kernel, int p,
                                                 int q, std::vector<Vec2> targets,
                                                 double epsilon)
    : impl_(std::make_unique<Impl>()) {
    impl_->mesh = &mesh;
    impl_->kernel = kernel;
    impl_->p = p;
    impl_->q = q;
    impl_->epsilon = epsilon;
    impl_->build(std::move(targets));
}

VolumePotentialOperator::~VolumePotentialOperator() = default;
VolumePotentialOperator::VolumePotentialOperator(VolumePotentialOperator&&) noexcept = default;
VolumePotentialOperator& VolumePotentialOperator::operator=(VolumePotentialOperator&&) noexcept = default;

std::vector<double> VolumePotentialOperator::apply(
    const std::vector<double>& f_samples, ApplyTimings* timings) const {
    const Impl& im = *impl_;
    if (static_cast<int>(f_samples.size()) != im.stats.ndofs)
        throw std::invalid_argument("apply: expected " +
                                    std::to_string(im.stats.ndofs) +
                                    " samples, got " +
                                    std::to_string(f_samples.size()));

    auto t0 = std::chrono::steady_clock::now();
    std::vector<double> charges;
    im.build_charges(f_samples, charges);
    std::vector<double> out = im.plan->apply(charges);
    const double smooth_s = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const int nt = static_cast<int>(im.targets.size());
    parallel_chunks(nt, 1024, [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t t = b; t < e; ++t) {
            double corr = 0;
            for (int k = im.blk_off[static_cast<size_t>(t)];
                 k < im.blk_off[static_cast<size_t>(t) + 1]; ++k) {
                const Impl::Block& blk = im.blocks[static_cast<size_t>(k)];
                const Eigen::RowVectorXd& row = im.pool[static_cast<size_t>(blk.pool)];
                const Eigen::Map<const Eigen::VectorXd> fc(
                    f_samples.data() + im.node_off[static_cast<size_t>(blk.cell)],
                    row.size());
                corr += row.dot(fc);
            }
            out[static_cast<size_t>(t)] += corr;
        }
    });
    const double corr_s = seconds_since(t0);

    if (timings) {
        timings->smooth_seconds = smooth_s;
        timings->correction_seconds = corr_s;
    }
    return out;
}

double VolumePotentialOperator::interpolate_solution(
    const std::vector<double>& node_values, Vec2 pt) const {
    const Impl& im = *impl_;
    if (static_cast<int>(node_values.size()) != im.stats.ndofs)
        throw std::invalid_argument("interpolate_solution: wrong value count");
    const TargetClassification tc = classify_target(*im.mesh, pt);
    const Cell& cell = im.mesh->cells[static_cast<size_t>(tc.self)];
    const Vec2 z = cell.invert(pt);
    const int np = im.cell_node_count(cell);
    const Eigen::Map<const Eigen::VectorXd> vals(
        node_values.data() + im.node_off[static_cast<size_t>(tc.self)], np);
    const Eigen::VectorXd coeff = im.coeff_map(cell) * vals;
    std::vector<double> phi(static_cast<size_t>(np));
    if (cell.type == CellType::Box)
        chebyshev2d_eval(im.p, z.x, z.y, phi.data());
    else
        koornwinder_eval(im.p, z.x, z.y, phi.data());
    double out = 0;
    for (int i = 0; i < np; ++i) out += phi[static_cast<size_t>(i)] * coeff[i];
    return out;
}

std::vector<double> VolumePotentialOperator::interpolate_solution(
    const std::vector<double>& node_values, const std::vector<Vec2>& pts) const {
    std::vector<double> out(pts.size());
    parallel_try(static_cast<std::int64_t>(pts.size()), [&](std::int64_t i) {
        out[static_cast<size_t>(i)] =
            interpolate_solution(node_values, pts[static_cast<size_t>(i)]);
    });
    return out;
}

std::vector<double> VolumePotentialOperator::evaluate_at(
    const std::vector<double>& f_samples, const std::vector<Vec2>& pts) const {
    const Impl& im = *impl_;
    if (static_cast<int>(f_samples.size()) != im.stats.ndofs)
        throw std::invalid_argument("evaluate_at: wrong sample count");
    std::vector<double> charges;
    im.build_charges(f_samples, charges);
    std::vector<double> out(pts.size());
    parallel_try(static_cast<std::int64_t>(pts.size()), [&](std::int64_t i) {
        const Vec2 pt = pts[static_cast<size_t>(i)];
        double acc = 0;
        for (size_t s = 0; s < im.src_pts.size(); ++s) {
            const double r2 = (im.src_pts[s] - pt).norm2();
            if (r2 == 0.0) continue;
            acc += charges[s] * im.kernel.radial_r2(r2);
        }
        const TargetClassification tc = classify_target(*im.mesh, pt);
        auto add_corr = [&](int cell_id, bool is_self) {
            const Cell& cell = im.mesh->cells[static_cast<size_t>(cell_id)];
            const Eigen::RowVectorXd row =
                im.correction_row_generic(cell, pt, is_self);
            const Eigen::Map<const Eigen::VectorXd> fc(
                f_samples.data() + im.node_off[static_cast<size_t>(cell_id)],
                row.size());
            acc += row.dot(fc);
        };
        add_corr(tc.self, true);
        for (int c : tc.near_cells) add_corr(c, false);
        out[static_cast<size_t>(i)] = acc;
    });
    return out;
}

const std::vector<Vec2>& VolumePotentialOperator::nodes() const { return impl_->nodes; }
const std::vector<Vec2>& VolumePotentialOperator::targets() const { return impl_->targets; }
int VolumePotentialOperator::ndofs() const { return impl_->stats.ndofs; }
int VolumePotentialOperator::nsrcs() const { return impl_->stats.nsrcs; }
const OperatorStats& VolumePotentialOperator::stats() const { return impl_->stats; }

VolumePotentialOperator build_operator(const HybridMesh& mesh, const Kernel& kernel,
                                       int p, int q, std::vector<Vec2> targets,
                                       double epsilon) {
    return VolumePotentialOperator(mesh, kernel, p, q, std::move(targets), epsilon);
}

}  // namespace volpot
