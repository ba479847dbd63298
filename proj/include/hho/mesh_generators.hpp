#pragma once

#include <cstdint>

#include "hho/mesh.hpp"

namespace hho {

/// n x n axis-aligned squares covering the unit square.
Mesh make_cartesian(std::size_t n);

struct VoronoiOptions {
    std::size_t n_seeds = 16;
    std::uint64_t rng_seed = 42;
    std::size_t lloyd_iters = 40;
    /// Interior edges shorter than this fraction of the smaller adjacent cell
    /// diameter are collapsed after the last relaxation step.
    double min_edge_ratio = 0.05;
};

/// Bounded Voronoi diagram of Lloyd-relaxed, grid-jittered seeds clipped to
/// the unit square. Deterministic for fixed options.
Mesh make_voronoi(const VoronoiOptions& options);

inline Mesh make_voronoi(std::size_t n_seeds, std::uint64_t rng_seed, std::size_t lloyd_iters)
{
    VoronoiOptions opt;
    opt.n_seeds = n_seeds;
    opt.rng_seed = rng_seed;
    opt.lloyd_iters = lloyd_iters;
    return make_voronoi(opt);
}

/// Largest ratio h_T^2 / |T| over all cells, a simple shape-quality measure.
double max_aspect_ratio(const Mesh& mesh);

}  // namespace hho
