#include "trisplat/metrics/chamfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "trisplat/core/parallel.hpp"
#include "trisplat/core/rng.hpp"

namespace trisplat {

std::vector<Vec3> sample_mesh_surface(const TriMesh& mesh, size_t samples, uint64_t seed) {
    if (mesh.empty()) throw std::invalid_argument("sample_mesh_surface: empty mesh");
    if (samples == 0) throw std::invalid_argument("sample_mesh_surface: samples == 0");
    const size_t nf = mesh.face_count();
    std::vector<double> cum(nf);
    double total = 0.0;
    for (size_t f = 0; f < nf; ++f) {
        const Vec3 a = mesh.positions[3 * f], b = mesh.positions[3 * f + 1],
                   c = mesh.positions[3 * f + 2];
        total += 0.5 * (b - a).cross(c - a).norm();
        cum[f] = total;
    }
    if (!(total > 0.0)) throw std::invalid_argument("sample_mesh_surface: zero surface area");

    Rng rng(seed);
    std::vector<Vec3> out(samples);
    for (size_t i = 0; i < samples; ++i) {
        const double u = rng.uniform() * total;
        const size_t f = std::lower_bound(cum.begin(), cum.end(), u) - cum.begin();
        double u1 = rng.uniform(), u2 = rng.uniform();
        if (u1 + u2 > 1.0) {
            u1 = 1.0 - u1;
            u2 = 1.0 - u2;
        }
        const Vec3 a = mesh.positions[3 * f], b = mesh.positions[3 * f + 1],
                   c = mesh.positions[3 * f + 2];
        out[i] = a + (b - a) * u1 + (c - a) * u2;
    }
    return out;
}

PointGrid::PointGrid(const std::vector<Vec3>& points) : points_(points) {
    if (points_.empty()) throw std::invalid_argument("PointGrid: empty point set");
    Vec3 lo = points_[0], hi = points_[0];
    for (const Vec3& p : points_) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    origin_ = lo;
    const Vec3 span = hi - lo;
    const double diag = std::max(span.norm(), 1e-12);
    const double target = diag / std::max(1.0, std::cbrt(static_cast<double>(points_.size())));
    cell_ = std::max(target, 1e-12);
    auto dims = [&](double extent) {
        return std::max(1, std::min(512, static_cast<int>(extent / cell_) + 1));
    };
    nx_ = dims(span.x);
    ny_ = dims(span.y);
    nz_ = dims(span.z);
    // Counting sort points into cells.
    const size_t ncells = static_cast<size_t>(nx_) * ny_ * nz_;
    cell_start_.assign(ncells + 1, 0);
    auto cell_of = [&](Vec3 p, int& cx, int& cy, int& cz) {
        cx = std::min(nx_ - 1, std::max(0, static_cast<int>((p.x - origin_.x) / cell_)));
        cy = std::min(ny_ - 1, std::max(0, static_cast<int>((p.y - origin_.y) / cell_)));
        cz = std::min(nz_ - 1, std::max(0, static_cast<int>((p.z - origin_.z) / cell_)));
    };
    std::vector<uint32_t> cell_id(points_.size());
    for (size_t i = 0; i < points_.size(); ++i) {
        int cx, cy, cz;
        cell_of(points_[i], cx, cy, cz);
        cell_id[i] = static_cast<uint32_t>(cell_index(cx, cy, cz));
        cell_start_[cell_id[i] + 1]++;
    }
    for (size_t c = 0; c < ncells; ++c) cell_start_[c + 1] += cell_start_[c];
    order_.resize(points_.size());
    std::vector<uint32_t> cursor(cell_start_.begin(), cell_start_.end() - 1);
    for (size_t i = 0; i < points_.size(); ++i) order_[cursor[cell_id[i]]++] = static_cast<uint32_t>(i);
}

std::pair<size_t, double> PointGrid::nearest(Vec3 query, size_t exclude) const {
    int qx = static_cast<int>(std::floor((query.x - origin_.x) / cell_));
    int qy = static_cast<int>(std::floor((query.y - origin_.y) / cell_));
    int qz = static_cast<int>(std::floor((query.z - origin_.z) / cell_));
    double best = std::numeric_limits<double>::infinity();
    size_t best_idx = 0;
    const int max_ring = nx_ + ny_ + nz_ + 2;
    for (int ring = 0; ring <= max_ring; ++ring) {
        // Cells at Chebyshev distance `ring` can hold points no closer than
        // (ring - 1) * cell; once that exceeds the best, stop.
        if (best < std::numeric_limits<double>::infinity() && (ring - 1) * cell_ > best) break;
        bool any_cell = false;
        const int x0 = qx - ring, x1 = qx + ring;
        const int y0 = qy - ring, y1 = qy + ring;
        const int z0 = qz - ring, z1 = qz + ring;
        for (int cz = z0; cz <= z1; ++cz) {
            if (cz < 0 || cz >= nz_) continue;
            for (int cy = y0; cy <= y1; ++cy) {
                if (cy < 0 || cy >= ny_) continue;
                for (int cx = x0; cx <= x1; ++cx) {
                    if (cx < 0 || cx >= nx_) continue;
                    // shell only
                    if (ring > 0 && cx != x0 && cx != x1 && cy != y0 && cy != y1 && cz != z0 &&
                        cz != z1)
                        continue;
                    any_cell = true;
                    const size_t c = cell_index(cx, cy, cz);
                    for (uint32_t k = cell_start_[c]; k < cell_start_[c + 1]; ++k) {
                        const size_t i = order_[k];
                        if (i == exclude) continue;
                        const double d = (points_[i] - query).norm();
                        if (d < best) {
                            best = d;
                            best_idx = i;
                        }
                    }
                }
            }
        }
        if (!any_cell && best < std::numeric_limits<double>::infinity() &&
            ring > std::max({nx_, ny_, nz_}))
            break;
    }
    return {best_idx, best};
}

namespace {

double mean_nearest(const std::vector<Vec3>& from, const PointGrid& grid) {
    std::vector<double> dist(from.size());
    parallel_for(static_cast<int64_t>(from.size()),
                 [&](int64_t i) { dist[i] = grid.nearest(from[i]).second; });
    double sum = 0.0;  // ordered sum: thread-count independent
    for (double d : dist) sum += d;
    return sum / static_cast<double>(from.size());
}

}  // namespace

ChamferReport chamfer_distance(const TriMesh& a, const TriMesh& b, size_t samples_per_mesh,
                               uint64_t seed) {
    if (a.empty() || b.empty()) throw std::invalid_argument("chamfer_distance: empty mesh");
    const auto sa = sample_mesh_surface(a, samples_per_mesh, seed);
    const auto sb = sample_mesh_surface(b, samples_per_mesh, seed + 1);
    const PointGrid ga(sa), gb(sb);
    ChamferReport rep;
    rep.samples_per_mesh = samples_per_mesh;
    rep.mean_a_to_b = mean_nearest(sa, gb);
    rep.mean_b_to_a = mean_nearest(sb, ga);
    rep.mean_symmetric = 0.5 * (rep.mean_a_to_b + rep.mean_b_to_a);
    return rep;
}

}  // namespace trisplat
