#include "hhoplast/mesh/merge.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace hhoplast {

namespace {

using edge_key = std::pair<int, int>;

edge_key make_key(int a, int b) { return { std::min(a, b), std::max(a, b) }; }

// position of the directed edge a->b in a loop, or -1
int find_edge(const std::vector<int>& loop, int a, int b)
{
    const int n = static_cast<int>(loop.size());
    for (int i = 0; i < n; i++)
        if (loop[i] == a && loop[(i + 1) % n] == b)
            return i;
    return -1;
}

bool collinear(const Vec3& u, const Vec3& v, const Vec3& w)
{
    const Vec3 e1 = v - u;
    const Vec3 e2 = w - v;
    const double cross = e1.x() * e2.y() - e1.y() * e2.x();
    return std::abs(cross) <= 1e-12 * e1.norm() * e2.norm();
}

} // namespace

Mesh merge_cells(const Mesh& mesh, double fraction, std::uint64_t seed)
{
    if (mesh.dim != 2)
        throw std::invalid_argument("merge_cells: only 2d meshes supported");
    if (fraction < 0.0 || fraction > 1.0)
        throw std::invalid_argument("merge_cells: fraction must be in [0,1]");

    const int n_cells = static_cast<int>(mesh.cells.size());
    std::mt19937_64 rng(seed);

    // explicit Fisher-Yates so the result only depends on the seed
    std::vector<int> order(n_cells);
    for (int i = 0; i < n_cells; i++)
        order[i] = i;
    for (int i = n_cells - 1; i > 0; i--) {
        const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
        std::swap(order[i], order[j]);
    }

    // pick disjoint pairs of neighbouring cells
    std::vector<int> partner(n_cells, -1);
    const int target_pairs = static_cast<int>(std::lround(fraction * n_cells / 2.0));
    int n_pairs = 0;
    for (int idx = 0; idx < n_cells && n_pairs < target_pairs; idx++) {
        const int a = order[idx];
        if (partner[a] >= 0)
            continue;
        std::vector<int> candidates;
        for (int f : mesh.cells[a].faces) {
            const Face& face = mesh.faces[f];
            const int other = face.cell_minus == a ? face.cell_plus : face.cell_minus;
            if (other < 0 || partner[other] >= 0)
                continue;
            int shared = 0;
            for (int g : mesh.cells[a].faces) {
                const Face& gf = mesh.faces[g];
                if (gf.cell_minus == other || gf.cell_plus == other)
                    shared++;
            }
            if (shared == 1)
                candidates.push_back(other);
        }
        if (candidates.empty())
            continue;
        const int b = candidates[rng() % candidates.size()];
        partner[a] = b;
        partner[b] = a;
        n_pairs++;
    }

    // splice loops: new cell ids follow the original order, one per pair lead
    std::vector<int> new_id(n_cells, -1);
    std::vector<std::vector<int>> loops;
    for (int c = 0; c < n_cells; c++) {
        if (partner[c] >= 0 && partner[c] < c)
            continue; // the lower index leads the pair
        new_id[c] = static_cast<int>(loops.size());
        if (partner[c] >= 0)
            new_id[partner[c]] = new_id[c];
        if (partner[c] < 0) {
            loops.push_back(mesh.cells[c].vertices);
            continue;
        }
        const int d = partner[c];
        // the shared face
        int shared_face = -1;
        for (int f : mesh.cells[c].faces) {
            const Face& face = mesh.faces[f];
            if (face.cell_minus == d || face.cell_plus == d) {
                shared_face = f;
                break;
            }
        }
        const int p = mesh.faces[shared_face].vertices[0];
        const int q = mesh.faces[shared_face].vertices[1];
        const std::vector<int>& lc = mesh.cells[c].vertices;
        const std::vector<int>& ld = mesh.cells[d].vertices;
        int ic = find_edge(lc, p, q), id_ = find_edge(ld, q, p);
        int b = q;
        if (ic < 0) { // c traverses q->p instead
            ic = find_edge(lc, q, p);
            id_ = find_edge(ld, p, q);
            b = p;
        }
        if (ic < 0 || id_ < 0)
            throw std::logic_error("merge_cells: shared edge not found in loops");
        // c: ... a b ...; d: ... b a ...; walk c from b back to a, then d from
        // a's successor back to the vertex before b
        const int nc = static_cast<int>(lc.size()), nd = static_cast<int>(ld.size());
        std::vector<int> loop;
        for (int s = 1; s < nc; s++)
            loop.push_back(lc[(ic + 1 + s) % nc]); // b's successor .. a
        loop.insert(loop.begin(), b);
        for (int s = 2; s < nd; s++)
            loop.push_back(ld[(id_ + s) % nd]); // a's successor .. b's predecessor
        loops.push_back(loop);
    }

    // boundary tags of surviving edges, indexed by vertex pair
    std::map<edge_key, int> boundary_tag;
    for (const auto& face : mesh.faces)
        if (face.on_boundary())
            boundary_tag[make_key(face.vertices[0], face.vertices[1])] = face.tag;

    // drop hanging vertices whose removal keeps the mesh conforming: a vertex
    // strictly inside a straight run of edges that either borders the domain
    // boundary with a single tag or separates the same two cells
    std::vector<std::vector<int>> cells_of_vertex(mesh.nodes.size());
    auto rebuild_usage = [&]() {
        for (auto& v : cells_of_vertex)
            v.clear();
        for (int c = 0; c < static_cast<int>(loops.size()); c++)
            for (int v : loops[c])
                cells_of_vertex[v].push_back(c);
    };
    rebuild_usage();

    bool changed = true;
    while (changed) {
        changed = false;
        for (int v = 0; v < static_cast<int>(mesh.nodes.size()); v++) {
            const auto& owners = cells_of_vertex[v];
            if (owners.empty() || owners.size() > 2)
                continue;
            const int m = owners[0];
            auto& lm = loops[m];
            const int nm = static_cast<int>(lm.size());
            if (nm <= 3)
                continue;
            const int im = static_cast<int>(std::find(lm.begin(), lm.end(), v) - lm.begin());
            const int u = lm[(im + nm - 1) % nm], w = lm[(im + 1) % nm];
            if (!collinear(mesh.nodes[u], mesh.nodes[v], mesh.nodes[w]))
                continue;
            if (owners.size() == 1) {
                // both edges on the domain boundary; fuse only within one tag
                const auto ta = boundary_tag.find(make_key(u, v));
                const auto tb = boundary_tag.find(make_key(v, w));
                if (ta == boundary_tag.end() || tb == boundary_tag.end()
                    || ta->second != tb->second)
                    continue;
                const int tag = ta->second;
                boundary_tag.erase(ta);
                boundary_tag.erase(make_key(v, w));
                boundary_tag[make_key(u, w)] = tag;
                lm.erase(lm.begin() + im);
            } else {
                const int nb = owners[1];
                auto& ln = loops[nb];
                const int nn = static_cast<int>(ln.size());
                if (nn <= 3)
                    continue;
                const int in = static_cast<int>(std::find(ln.begin(), ln.end(), v) - ln.begin());
                const int un = ln[(in + nn - 1) % nn], wn = ln[(in + 1) % nn];
                if (un != w || wn != u)
                    continue; // edges not shared pairwise with the same cell
                lm.erase(lm.begin() + im);
                ln.erase(ln.begin() + in);
            }
            changed = true;
            rebuild_usage();
        }
    }

    // compact vertices and assemble the merged mesh
    std::vector<int> vmap(mesh.nodes.size(), -1);
    Mesh out;
    out.dim = 2;
    out.tag_names = mesh.tag_names;
    for (const auto& loop : loops)
        for (int v : loop)
            if (vmap[v] < 0) {
                vmap[v] = static_cast<int>(out.nodes.size());
                out.nodes.push_back(mesh.nodes[v]);
            }
    for (const auto& loop : loops) {
        Cell cell;
        for (int v : loop)
            cell.vertices.push_back(vmap[v]);
        out.cells.push_back(cell);
    }
    out.finalize_2d();

    std::map<edge_key, int> mapped_tag;
    for (const auto& [key, tag] : boundary_tag)
        mapped_tag[make_key(vmap[key.first], vmap[key.second])] = tag;
    for (auto& face : out.faces) {
        if (!face.on_boundary())
            continue;
        const auto it = mapped_tag.find(make_key(face.vertices[0], face.vertices[1]));
        if (it == mapped_tag.end())
            throw std::logic_error("merge_cells: lost boundary tag");
        face.tag = it->second;
    }
    return out;
}

} // namespace hhoplast
