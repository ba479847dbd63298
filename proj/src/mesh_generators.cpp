#include "hho/mesh_generators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <unordered_map>

namespace hho {

Mesh make_cartesian(std::size_t n)
{
    if (n == 0) throw MeshError("cartesian mesh needs n >= 1");
    std::vector<Point> vertices;
    vertices.reserve((n + 1) * (n + 1));
    for (std::size_t j = 0; j <= n; ++j)
        for (std::size_t i = 0; i <= n; ++i)
            vertices.emplace_back(double(i) / double(n), double(j) / double(n));

    auto id = [n](std::size_t i, std::size_t j) { return j * (n + 1) + i; };
    std::vector<std::vector<std::size_t>> cells;
    cells.reserve(n * n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i)
            cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    return Mesh(std::move(vertices), std::move(cells));
}

double max_aspect_ratio(const Mesh& mesh)
{
    double r = 0.0;
    for (const auto& c : mesh.cells()) r = std::max(r, c.diameter * c.diameter / c.measure);
    return r;
}

namespace {

using Polygon = std::vector<Point>;

// Keeps the part of a convex polygon where dot(p, d) <= c.
Polygon clip_halfplane(const Polygon& poly, const Vector2& d, double c)
{
    Polygon out;
    out.reserve(poly.size() + 1);
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = poly[i];
        const Point& q = poly[(i + 1) % n];
        const double fp = p.dot(d) - c;
        const double fq = q.dot(d) - c;
        if (fp <= 0.0) out.push_back(p);
        if ((fp <= 0.0) != (fq <= 0.0)) {
            const double t = fp / (fp - fq);
            out.push_back(p + t * (q - p));
        }
    }
    return out;
}

Polygon unit_square()
{
    return {Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)};
}

class SeedGrid {
public:
    explicit SeedGrid(const std::vector<Point>& seeds)
        : seeds_(seeds), n_(std::max<std::size_t>(1, std::size_t(std::ceil(std::sqrt(double(seeds.size())))))),
          buckets_(n_ * n_)
    {
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            const auto [bx, by] = bucket_of(seeds[i]);
            buckets_[by * n_ + bx].push_back(i);
        }
    }

    std::pair<std::size_t, std::size_t> bucket_of(const Point& p) const
    {
        auto clampi = [this](double v) {
            const long b = long(std::floor(v * double(n_)));
            return std::size_t(std::clamp<long>(b, 0, long(n_) - 1));
        };
        return {clampi(p.x()), clampi(p.y())};
    }

    double bucket_size() const { return 1.0 / double(n_); }
    std::size_t n() const { return n_; }
    const std::vector<std::size_t>& bucket(std::size_t bx, std::size_t by) const { return buckets_[by * n_ + bx]; }

private:
    const std::vector<Point>& seeds_;
    std::size_t n_;
    std::vector<std::vector<std::size_t>> buckets_;
};

Polygon voronoi_cell(const std::vector<Point>& seeds, const SeedGrid& grid, std::size_t i)
{
    Polygon poly = unit_square();
    const Point& s = seeds[i];
    const auto [bx, by] = grid.bucket_of(s);
    const long n = long(grid.n());

    auto radius = [&]() {
        double r = 0.0;
        for (const auto& v : poly) r = std::max(r, (v - s).norm());
        return r;
    };

    for (long ring = 0; ring < n; ++ring) {
        for (long jy = long(by) - ring; jy <= long(by) + ring; ++jy) {
            for (long jx = long(bx) - ring; jx <= long(bx) + ring; ++jx) {
                if (std::max(std::abs(jx - long(bx)), std::abs(jy - long(by))) != ring) continue;
                if (jx < 0 || jy < 0 || jx >= n || jy >= n) continue;
                for (std::size_t j : grid.bucket(std::size_t(jx), std::size_t(jy))) {
                    if (j == i) continue;
                    const Vector2 d = seeds[j] - s;
                    if (d.norm() < 1e-14)
                        throw MeshError("voronoi: seeds " + std::to_string(i) + " and " + std::to_string(j)
                                        + " coincide");
                    const Point m = 0.5 * (seeds[j] + s);
                    poly = clip_halfplane(poly, d, m.dot(d));
                    if (poly.size() < 3)
                        throw MeshError("voronoi: degenerate cell for seed " + std::to_string(i));
                }
            }
        }
        if (double(ring) * grid.bucket_size() >= 2.0 * radius()) break;
    }

    if (poly.size() < 3 || signed_area(poly) < 1e-14)
        throw MeshError("voronoi: zero-area cell for seed " + std::to_string(i));
    return poly;
}

std::vector<Polygon> voronoi_cells(const std::vector<Point>& seeds)
{
    SeedGrid grid(seeds);
    std::vector<Polygon> cells;
    cells.reserve(seeds.size());
    for (std::size_t i = 0; i < seeds.size(); ++i) cells.push_back(voronoi_cell(seeds, grid, i));
    return cells;
}

// Uniform double in [0, 1) from the top 53 bits; portable across standard libraries.
double uniform01(std::mt19937_64& rng)
{
    return double(rng() >> 11) * 0x1.0p-53;
}

std::vector<Point> jittered_seeds(std::size_t n_seeds, std::uint64_t rng_seed)
{
    std::mt19937_64 rng(rng_seed);
    const std::size_t cols = std::size_t(std::ceil(std::sqrt(double(n_seeds))));
    const std::size_t rows = (n_seeds + cols - 1) / cols;
    std::vector<Point> seeds;
    seeds.reserve(n_seeds);
    for (std::size_t k = 0; k < n_seeds; ++k) {
        const std::size_t i = k % cols;
        const std::size_t j = k / cols;
        const double jx = 0.1 + 0.8 * uniform01(rng);
        const double jy = 0.1 + 0.8 * uniform01(rng);
        seeds.emplace_back((double(i) + jx) / double(cols), (double(j) + jy) / double(rows));
    }
    return seeds;
}

struct WeldedMesh {
    std::vector<Point> vertices;
    std::vector<std::vector<std::size_t>> loops;
};

void remove_consecutive_duplicates(std::vector<std::size_t>& loop)
{
    std::vector<std::size_t> out;
    for (std::size_t v : loop)
        if (out.empty() || out.back() != v) out.push_back(v);
    while (out.size() > 1 && out.front() == out.back()) out.pop_back();
    loop = std::move(out);
}

WeldedMesh weld(const std::vector<Polygon>& cells, double tol)
{
    WeldedMesh w;
    std::unordered_map<long long, std::vector<std::size_t>> hash;
    auto key = [](long long ix, long long iy) { return ix * 4000000007LL + iy; };

    auto find_or_add = [&](const Point& p) {
        const long long ix = std::llround(p.x() / tol);
        const long long iy = std::llround(p.y() / tol);
        for (long long dx = -1; dx <= 1; ++dx)
            for (long long dy = -1; dy <= 1; ++dy) {
                auto it = hash.find(key(ix + dx, iy + dy));
                if (it == hash.end()) continue;
                for (std::size_t v : it->second)
                    if ((w.vertices[v] - p).norm() <= tol) return v;
            }
        const std::size_t id = w.vertices.size();
        w.vertices.push_back(p);
        hash[key(ix, iy)].push_back(id);
        return id;
    };

    for (const auto& poly : cells) {
        std::vector<std::size_t> loop;
        for (const auto& p : poly) loop.push_back(find_or_add(p));
        remove_consecutive_duplicates(loop);
        w.loops.push_back(std::move(loop));
    }
    return w;
}

bool on_left(const Point& p) { return p.x() == 0.0; }
bool on_right(const Point& p) { return p.x() == 1.0; }
bool on_bottom(const Point& p) { return p.y() == 0.0; }
bool on_top(const Point& p) { return p.y() == 1.0; }
int boundary_sides(const Point& p)
{
    return int(on_left(p)) + int(on_right(p)) + int(on_bottom(p)) + int(on_top(p));
}
bool share_side(const Point& a, const Point& b)
{
    return (on_left(a) && on_left(b)) || (on_right(a) && on_right(b)) || (on_bottom(a) && on_bottom(b))
        || (on_top(a) && on_top(b));
}

bool cell_ok(const WeldedMesh& w, const std::vector<std::size_t>& loop)
{
    if (loop.size() < 3) return false;
    Polygon poly;
    for (std::size_t v : loop) poly.push_back(w.vertices[v]);
    return signed_area(poly) > 0.0 && is_simple_polygon(poly);
}

double loop_diameter(const WeldedMesh& w, const std::vector<std::size_t>& loop)
{
    Polygon poly;
    for (std::size_t v : loop) poly.push_back(w.vertices[v]);
    return polygon_diameter(poly);
}

// Collapses edges much shorter than their adjacent cells; keeps corners and
// boundary vertices on the boundary.
void collapse_short_edges(WeldedMesh& w, double ratio)
{
    std::set<std::pair<std::size_t, std::size_t>> rejected;
    for (int pass = 0; pass < 100; ++pass) {
        // edge -> adjacent cells
        std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> edges;
        for (std::size_t c = 0; c < w.loops.size(); ++c) {
            const auto& l = w.loops[c];
            for (std::size_t i = 0; i < l.size(); ++i) edges[std::minmax(l[i], l[(i + 1) % l.size()])].push_back(c);
        }
        std::vector<double> diam(w.loops.size());
        for (std::size_t c = 0; c < w.loops.size(); ++c) diam[c] = loop_diameter(w, w.loops[c]);

        std::vector<std::pair<double, std::pair<std::size_t, std::size_t>>> candidates;
        for (const auto& [e, cs] : edges) {
            double hmin = diam[cs[0]];
            for (std::size_t c : cs) hmin = std::min(hmin, diam[c]);
            const double len = (w.vertices[e.first] - w.vertices[e.second]).norm();
            if (len < ratio * hmin && !rejected.count(e)) candidates.push_back({len, e});
        }
        if (candidates.empty()) return;
        std::sort(candidates.begin(), candidates.end());

        std::set<std::size_t> touched;
        bool changed = false;
        for (const auto& [len, e] : candidates) {
            auto [a, b] = e;
            if (touched.count(a) || touched.count(b)) continue;
            const Point pa = w.vertices[a];
            const Point pb = w.vertices[b];
            const int sa = boundary_sides(pa);
            const int sb = boundary_sides(pb);
            Point target;
            if (sa == 2 && sb == 2) { rejected.insert(e); continue; }
            if (sa == 2) target = pa;
            else if (sb == 2) target = pb;
            else if (sa == 1 && sb == 0) target = pa;
            else if (sb == 1 && sa == 0) target = pb;
            else if (sa == 1 && sb == 1) {
                if (!share_side(pa, pb)) { rejected.insert(e); continue; }
                target = 0.5 * (pa + pb);
            } else target = 0.5 * (pa + pb);

            const auto saved_vertex = w.vertices[a];
            const auto saved_loops = w.loops;
            w.vertices[a] = target;
            bool ok = true;
            for (auto& loop : w.loops) {
                bool has = false;
                for (auto& v : loop)
                    if (v == b || v == a) { v = (v == b) ? a : v; has = true; }
                if (!has) continue;
                remove_consecutive_duplicates(loop);
                if (!cell_ok(w, loop)) { ok = false; break; }
            }
            if (!ok) {
                w.vertices[a] = saved_vertex;
                w.loops = saved_loops;
                rejected.insert(e);
                continue;
            }
            touched.insert(a);
            touched.insert(b);
            changed = true;
        }
        if (!changed) return;
    }
}

Mesh compact(const WeldedMesh& w)
{
    std::vector<std::size_t> remap(w.vertices.size(), std::size_t(-1));
    std::vector<Point> vertices;
    std::vector<std::vector<std::size_t>> loops = w.loops;
    for (auto& loop : loops)
        for (auto& v : loop) {
            if (remap[v] == std::size_t(-1)) {
                remap[v] = vertices.size();
                vertices.push_back(w.vertices[v]);
            }
            v = remap[v];
        }
    return Mesh(std::move(vertices), std::move(loops));
}

}  // namespace

Mesh make_voronoi(const VoronoiOptions& options)
{
    if (options.n_seeds == 0) throw MeshError("voronoi mesh needs at least one seed");
    std::vector<Point> seeds = jittered_seeds(options.n_seeds, options.rng_seed);

    for (std::size_t it = 0; it < options.lloyd_iters; ++it) {
        const auto cells = voronoi_cells(seeds);
        for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = polygon_centroid(cells[i]);
    }

    const auto cells = voronoi_cells(seeds);
    WeldedMesh w = weld(cells, 1e-10);
    for (std::size_t c = 0; c < w.loops.size(); ++c)
        if (!cell_ok(w, w.loops[c]))
            throw MeshError("voronoi: degenerate cell for seed " + std::to_string(c) + " after welding");
    collapse_short_edges(w, options.min_edge_ratio);
    return compact(w);
}

}  // namespace hho
