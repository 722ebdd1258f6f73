#include "pcat/registration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace pcat {

void DeformationField::validate() const {
    control_grid.validate();
    if (displacements.size() != control_grid.voxel_count())
        throw std::runtime_error("field: displacement count does not match control grid");
    for (const auto& d : displacements)
        for (double c : d)
            if (!std::isfinite(c)) throw std::runtime_error("field: non-finite displacement");
}

Vec3 DeformationField::sample(const Vec3& p) const {
    const GridSpec& g = control_grid;
    Vec3 c = g.to_voxel(p);
    double fx = std::clamp(c[0], 0.0, static_cast<double>(g.sizes[0] - 1));
    double fy = std::clamp(c[1], 0.0, static_cast<double>(g.sizes[1] - 1));
    double fz = std::clamp(c[2], 0.0, static_cast<double>(g.sizes[2] - 1));
    int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy), z0 = static_cast<int>(fz);
    int x1 = std::min(x0 + 1, g.sizes[0] - 1);
    int y1 = std::min(y0 + 1, g.sizes[1] - 1);
    int z1 = std::min(z0 + 1, g.sizes[2] - 1);
    double tx = fx - x0, ty = fy - y0, tz = fz - z0;

    auto at = [&](int i, int j, int k) -> const Vec3& {
        return displacements[static_cast<std::size_t>(i) +
                             static_cast<std::size_t>(g.sizes[0]) *
                                 (static_cast<std::size_t>(j) +
                                  static_cast<std::size_t>(g.sizes[1]) * k)];
    };
    Vec3 out;
    for (int a = 0; a < 3; ++a) {
        double c00 = at(x0, y0, z0)[a] + tx * (at(x1, y0, z0)[a] - at(x0, y0, z0)[a]);
        double c10 = at(x0, y1, z0)[a] + tx * (at(x1, y1, z0)[a] - at(x0, y1, z0)[a]);
        double c01 = at(x0, y0, z1)[a] + tx * (at(x1, y0, z1)[a] - at(x0, y0, z1)[a]);
        double c11 = at(x0, y1, z1)[a] + tx * (at(x1, y1, z1)[a] - at(x0, y1, z1)[a]);
        double c0 = c00 + ty * (c10 - c00);
        double c1 = c01 + ty * (c11 - c01);
        out[a] = c0 + tz * (c1 - c0);
    }
    return out;
}

void RegParams::validate() const {
    if (n_levels < 1) throw std::invalid_argument("reg: n_levels must be >= 1");
    if (static_cast<int>(control_spacing_mm.size()) != n_levels ||
        static_cast<int>(search_radius_mm.size()) != n_levels ||
        static_cast<int>(search_step_mm.size()) != n_levels)
        throw std::invalid_argument("reg: per-level parameter lists must have n_levels entries");
    for (int l = 1; l < n_levels; ++l)
        if (!(control_spacing_mm[l] < control_spacing_mm[l - 1]))
            throw std::invalid_argument("reg: control spacings must be strictly decreasing");
    for (int l = 0; l < n_levels; ++l) {
        if (!(control_spacing_mm[l] > 0) || !(search_radius_mm[l] > 0) || !(search_step_mm[l] > 0))
            throw std::invalid_argument("reg: level parameters must be positive");
    }
    if (icm_sweeps < 1) throw std::invalid_argument("reg: icm_sweeps must be >= 1");
}

namespace {

struct ControlGrid {
    GridSpec grid;
    int nx, ny, nz;
};

ControlGrid make_control_grid(const GridSpec& vol, double spacing_mm) {
    ControlGrid cg;
    for (int a = 0; a < 3; ++a) {
        double extent = (vol.sizes[a] - 1) * vol.spacing[a];
        int n = static_cast<int>(std::ceil(extent / spacing_mm)) + 1;
        cg.grid.sizes[a] = std::max(n, 2);
        cg.grid.spacing[a] = spacing_mm;
        cg.grid.origin[a] = vol.origin[a];
    }
    cg.nx = cg.grid.sizes[0];
    cg.ny = cg.grid.sizes[1];
    cg.nz = cg.grid.sizes[2];
    return cg;
}

// Strided SSD sample positions for one block, capped at max_samples.
struct Block {
    std::vector<int> xs, ys, zs; // per-axis voxel coordinates
    std::vector<double> fixed_vals;
    double variance = 0.0;
};

Block make_block(const Volume& fixed, const Vec3& center_mm, double half_mm, int max_samples) {
    const GridSpec& g = fixed.grid;
    Block b;
    int lo[3], hi[3];
    for (int a = 0; a < 3; ++a) {
        int c = static_cast<int>(std::lround((center_mm[a] - g.origin[a]) / g.spacing[a]));
        int h = std::max(1, static_cast<int>(std::lround(half_mm / g.spacing[a])));
        lo[a] = std::max(0, c - h);
        hi[a] = std::min(g.sizes[a] - 1, c + h);
    }
    int stride[3] = {1, 1, 1};
    auto count = [&]() {
        long long total = 1;
        for (int a = 0; a < 3; ++a) total *= (hi[a] - lo[a]) / stride[a] + 1;
        return total;
    };
    while (count() > max_samples) {
        // widen the stride on the axis with the most positions
        int best = 0;
        long long most = -1;
        for (int a = 0; a < 3; ++a) {
            long long n = (hi[a] - lo[a]) / stride[a] + 1;
            if (n > most) {
                most = n;
                best = a;
            }
        }
        ++stride[best];
    }
    std::vector<int> axes[3];
    for (int a = 0; a < 3; ++a)
        for (int v = lo[a]; v <= hi[a]; v += stride[a]) axes[a].push_back(v);

    double sum = 0.0, sum2 = 0.0;
    for (int z : axes[2])
        for (int y : axes[1])
            for (int x : axes[0]) {
                double v = fixed.at(x, y, z);
                b.xs.push_back(x);
                b.ys.push_back(y);
                b.zs.push_back(z);
                b.fixed_vals.push_back(v);
                sum += v;
                sum2 += v * v;
            }
    double n = static_cast<double>(b.fixed_vals.size());
    b.variance = std::max(0.0, sum2 / n - (sum / n) * (sum / n));
    return b;
}

// Mean squared difference between the fixed block and the moving image
// shifted by disp (mm). Every sample shares the trilinear weights because
// block samples sit on integer voxel coordinates.
double block_ssd(const Block& b, const Volume& moving, const Vec3& disp) {
    const GridSpec& g = moving.grid;
    const int nx = g.sizes[0], ny = g.sizes[1], nz = g.sizes[2];
    double sx = disp[0] / g.spacing[0], sy = disp[1] / g.spacing[1], sz = disp[2] / g.spacing[2];
    double fx = std::floor(sx), fy = std::floor(sy), fz = std::floor(sz);
    double tx = sx - fx, ty = sy - fy, tz = sz - fz;
    int ox = static_cast<int>(fx), oy = static_cast<int>(fy), oz = static_cast<int>(fz);

    double w000 = (1 - tx) * (1 - ty) * (1 - tz), w100 = tx * (1 - ty) * (1 - tz);
    double w010 = (1 - tx) * ty * (1 - tz), w110 = tx * ty * (1 - tz);
    double w001 = (1 - tx) * (1 - ty) * tz, w101 = tx * (1 - ty) * tz;
    double w011 = (1 - tx) * ty * tz, w111 = tx * ty * tz;

    const double* mv = moving.values.data();
    const std::size_t sxn = 1, syn = static_cast<std::size_t>(nx),
                      szn = static_cast<std::size_t>(nx) * ny;

    double acc = 0.0;
    const std::size_t n = b.fixed_vals.size();
    for (std::size_t s = 0; s < n; ++s) {
        int x0 = b.xs[s] + ox, y0 = b.ys[s] + oy, z0 = b.zs[s] + oz;
        double m;
        if (x0 >= 0 && x0 + 1 < nx && y0 >= 0 && y0 + 1 < ny && z0 >= 0 && z0 + 1 < nz)
            [[likely]] {
            const double* p = mv + x0 * sxn + y0 * syn + z0 * szn;
            m = w000 * p[0] + w100 * p[sxn] + w010 * p[syn] + w110 * p[sxn + syn] +
                w001 * p[szn] + w101 * p[sxn + szn] + w011 * p[syn + szn] +
                w111 * p[sxn + syn + szn];
        } else {
            int xa = std::clamp(x0, 0, nx - 1), xb = std::clamp(x0 + 1, 0, nx - 1);
            int ya = std::clamp(y0, 0, ny - 1), yb = std::clamp(y0 + 1, 0, ny - 1);
            int za = std::clamp(z0, 0, nz - 1), zb = std::clamp(z0 + 1, 0, nz - 1);
            m = w000 * moving.at(xa, ya, za) + w100 * moving.at(xb, ya, za) +
                w010 * moving.at(xa, yb, za) + w110 * moving.at(xb, yb, za) +
                w001 * moving.at(xa, ya, zb) + w101 * moving.at(xb, ya, zb) +
                w011 * moving.at(xa, yb, zb) + w111 * moving.at(xb, yb, zb);
        }
        double d = m - b.fixed_vals[s];
        acc += d * d;
    }
    return acc / static_cast<double>(n);
}

struct Candidate {
    Vec3 disp;
    double mag2;
};

bool candidate_less(const Vec3& a, const Vec3& b) {
    double ma = a[0] * a[0] + a[1] * a[1] + a[2] * a[2];
    double mb = b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
    if (ma != mb) return ma < mb;
    return a < b; // lexicographic
}

} // namespace

DeformationField register_deformable(const Volume& fixed, const Volume& moving,
                                     const RegParams& params, RegDiagnostics* diagnostics) {
    fixed.validate();
    moving.validate();
    params.validate();
    if (!fixed.grid.congruent(moving.grid))
        throw std::runtime_error("register: moving must be resampled to the fixed grid first");
    for (const auto* vol : {&fixed, &moving})
        for (double v : vol->values)
            if (v < -300.0 || v > 300.0)
                throw std::runtime_error("register: inputs must be windowed to [-300, 300]");

    // global fixed-image variance normalizes the data term
    double gsum = 0.0, gsum2 = 0.0;
    for (double v : fixed.values) {
        gsum += v;
        gsum2 += v * v;
    }
    double gn = static_cast<double>(fixed.values.size());
    double gvar = std::max(0.0, gsum2 / gn - (gsum / gn) * (gsum / gn));
    if (gvar <= 0.0) throw std::runtime_error("register: no gradient signal (constant fixed image)");

    DeformationField field; // accumulated result, refined level by level
    bool have_field = false;

    if (diagnostics) {
        diagnostics->sweep_energies.assign(params.n_levels, {});
        diagnostics->searched_points.assign(params.n_levels, 0);
        diagnostics->total_points.assign(params.n_levels, 0);
    }

    for (int level = 0; level < params.n_levels; ++level) {
        ControlGrid cg = make_control_grid(fixed.grid, params.control_spacing_mm[level]);
        const int npts = cg.nx * cg.ny * cg.nz;

        std::vector<Vec3> disp(npts, Vec3{0, 0, 0});
        std::vector<Vec3> positions(npts);
        for (int k = 0, idx = 0; k < cg.nz; ++k)
            for (int j = 0; j < cg.ny; ++j)
                for (int i = 0; i < cg.nx; ++i, ++idx) {
                    positions[idx] = cg.grid.position(i, j, k);
                    if (have_field) disp[idx] = field.sample(positions[idx]);
                }

        std::vector<Block> blocks(npts);
        for (int idx = 0; idx < npts; ++idx)
            blocks[idx] = make_block(fixed, positions[idx], params.control_spacing_mm[level],
                                     params.block_max_samples);

        // low-signal blocks follow the regularizer only
        std::vector<char> searched(npts, 1);
        if (params.signal_skip_factor > 0.0) {
            std::vector<double> vars;
            vars.reserve(npts);
            for (const auto& b : blocks) vars.push_back(b.variance);
            std::nth_element(vars.begin(), vars.begin() + npts / 2, vars.end());
            double threshold = params.signal_skip_factor * vars[npts / 2];
            for (int idx = 0; idx < npts; ++idx)
                if (blocks[idx].variance < threshold) searched[idx] = 0;
        }
        if (diagnostics) {
            diagnostics->total_points[level] = npts;
            for (int idx = 0; idx < npts; ++idx)
                if (searched[idx]) ++diagnostics->searched_points[level];
        }

        // displacement lattice around the current value
        std::vector<Vec3> lattice;
        {
            double r = params.search_radius_mm[level], st = params.search_step_mm[level];
            int n = static_cast<int>(std::lround(r / st));
            for (int dz = -n; dz <= n; ++dz)
                for (int dy = -n; dy <= n; ++dy)
                    for (int dx = -n; dx <= n; ++dx)
                        lattice.push_back(Vec3{dx * st, dy * st, dz * st});
        }

        auto neighbor_indices = [&](int idx, int out[6]) {
            int i = idx % cg.nx, j = (idx / cg.nx) % cg.ny, k = idx / (cg.nx * cg.ny);
            int n = 0;
            if (i > 0) out[n++] = idx - 1;
            if (i + 1 < cg.nx) out[n++] = idx + 1;
            if (j > 0) out[n++] = idx - cg.nx;
            if (j + 1 < cg.ny) out[n++] = idx + cg.nx;
            if (k > 0) out[n++] = idx - cg.nx * cg.ny;
            if (k + 1 < cg.nz) out[n++] = idx + cg.nx * cg.ny;
            return n;
        };

        const double lambda = params.lambda_reg;
        std::vector<char> changed(npts, 1); // changed in previous sweep
        std::vector<char> changed_now(npts, 0);

        // one ICM update; returns true when the displacement moved
        auto update_point = [&](int idx) {
            int nbr[6];
            int nn = neighbor_indices(idx, nbr);
            Vec3 best = disp[idx];
            double best_cost = std::numeric_limits<double>::infinity();
            bool do_search = searched[idx] != 0;
            for (const Vec3& delta : lattice) {
                Vec3 c{disp[idx][0] + delta[0], disp[idx][1] + delta[1], disp[idx][2] + delta[2]};
                double reg = 0.0;
                for (int t = 0; t < nn; ++t) {
                    const Vec3& dj = disp[nbr[t]];
                    double ex = c[0] - dj[0], ey = c[1] - dj[1], ez = c[2] - dj[2];
                    reg += ex * ex + ey * ey + ez * ez;
                }
                double cost = lambda * reg;
                if (do_search) cost += block_ssd(blocks[idx], moving, c) / gvar;
                if (cost < best_cost ||
                    (cost == best_cost && candidate_less(c, best))) {
                    best_cost = cost;
                    best = c;
                }
            }
            bool moved = best != disp[idx];
            disp[idx] = best;
            return moved;
        };

        // red-black sweeps; points of one color share no edges, so any
        // processing order (or worker count) yields identical results
        for (int sweep = 0; sweep < params.icm_sweeps; ++sweep) {
            std::fill(changed_now.begin(), changed_now.end(), 0);
            bool any = false;
            for (int color = 0; color < 2; ++color) {
                std::vector<int> todo;
                for (int idx = 0; idx < npts; ++idx) {
                    int i = idx % cg.nx, j = (idx / cg.nx) % cg.ny, k = idx / (cg.nx * cg.ny);
                    if ((i + j + k) % 2 != color) continue;
                    // re-evaluate only when the point or a neighbor moved,
                    // counting moves of the other color earlier this sweep
                    bool stale = changed[idx] != 0;
                    if (!stale) {
                        int nbr[6];
                        int nn = neighbor_indices(idx, nbr);
                        for (int t = 0; t < nn && !stale; ++t)
                            stale = changed[nbr[t]] != 0 || changed_now[nbr[t]] != 0;
                    }
                    if (stale) todo.push_back(idx);
                }
                if (params.workers > 1 && todo.size() > 64) {
                    std::vector<std::thread> pool;
                    int nw = params.workers;
                    std::vector<std::vector<int>> moved_lists(nw);
                    for (int w = 0; w < nw; ++w) {
                        pool.emplace_back([&, w]() {
                            for (std::size_t t = w; t < todo.size(); t += nw)
                                if (update_point(todo[t])) moved_lists[w].push_back(todo[t]);
                        });
                    }
                    for (auto& th : pool) th.join();
                    for (const auto& lst : moved_lists)
                        for (int idx : lst) {
                            changed_now[idx] = 1;
                            any = true;
                        }
                } else {
                    for (int idx : todo)
                        if (update_point(idx)) {
                            changed_now[idx] = 1;
                            any = true;
                        }
                }
            }
            std::swap(changed, changed_now);

            if (diagnostics) {
                double e = 0.0;
                for (int idx = 0; idx < npts; ++idx) {
                    if (searched[idx]) e += block_ssd(blocks[idx], moving, disp[idx]) / gvar;
                    int nbr[6];
                    int nn = neighbor_indices(idx, nbr);
                    for (int t = 0; t < nn; ++t) {
                        if (nbr[t] < idx) continue; // each edge once
                        double ex = disp[idx][0] - disp[nbr[t]][0];
                        double ey = disp[idx][1] - disp[nbr[t]][1];
                        double ez = disp[idx][2] - disp[nbr[t]][2];
                        e += lambda * (ex * ex + ey * ey + ez * ez);
                    }
                }
                diagnostics->sweep_energies[level].push_back(e);
            }
            if (!any) break;
        }

        field.control_grid = cg.grid;
        field.displacements = std::move(disp);
        have_field = true;
    }

    field.validate();
    return field;
}

LabelMask warp_mask(const LabelMask& mask, const DeformationField& field, const GridSpec& target) {
    mask.validate();
    field.validate();
    target.validate();
    LabelMask out;
    out.grid = target;
    out.labels.assign(target.voxel_count(), 0);
    std::size_t idx = 0;
    for (int k = 0; k < target.sizes[2]; ++k)
        for (int j = 0; j < target.sizes[1]; ++j)
            for (int i = 0; i < target.sizes[0]; ++i, ++idx) {
                Vec3 x = target.position(i, j, k);
                Vec3 u = field.sample(x);
                Vec3 q{x[0] + u[0], x[1] + u[1], x[2] + u[2]};
                Vec3 c = mask.grid.to_voxel(q);
                int xi = static_cast<int>(std::lround(c[0]));
                int yi = static_cast<int>(std::lround(c[1]));
                int zi = static_cast<int>(std::lround(c[2]));
                if (xi < 0 || xi >= mask.grid.sizes[0] || yi < 0 || yi >= mask.grid.sizes[1] ||
                    zi < 0 || zi >= mask.grid.sizes[2])
                    continue; // outside stays background
                out.labels[idx] = mask.at(xi, yi, zi);
            }
    return out;
}

Vec3 invert_field_at(const DeformationField& field, const Vec3& moving_point, int max_iter,
                     double tol_mm) {
    Vec3 x = moving_point;
    for (int it = 0; it < max_iter; ++it) {
        Vec3 u = field.sample(x);
        Vec3 nx{moving_point[0] - u[0], moving_point[1] - u[1], moving_point[2] - u[2]};
        double d2 = 0.0;
        for (int a = 0; a < 3; ++a) d2 += (nx[a] - x[a]) * (nx[a] - x[a]);
        x = nx;
        if (d2 < tol_mm * tol_mm) break;
    }
    return x;
}

double center_distance(const DiskSet& a, const DiskSet& b) {
    double total = 0.0;
    int n = 0;
    for (const auto& da : a.disks) {
        for (const auto& db : b.disks) {
            if (da.slice_index != db.slice_index) continue;
            double dx = da.center_x - db.center_x, dy = da.center_y - db.center_y;
            total += std::sqrt(dx * dx + dy * dy);
            ++n;
            break;
        }
    }
    if (n == 0) throw std::runtime_error("center_distance: disk sets share no slice");
    return total / static_cast<double>(n);
}

double dice(const LabelMask& a, const LabelMask& b, std::uint8_t label) {
    a.validate();
    b.validate();
    if (!a.grid.congruent(b.grid)) throw std::runtime_error("dice: grids not congruent");
    std::size_t na = 0, nb = 0, ni = 0;
    for (std::size_t i = 0; i < a.labels.size(); ++i) {
        bool ia = a.labels[i] == label, ib = b.labels[i] == label;
        na += ia;
        nb += ib;
        ni += (ia && ib);
    }
    if (na + nb == 0) return 1.0;
    return 2.0 * static_cast<double>(ni) / static_cast<double>(na + nb);
}

void write_field(const DeformationField& field, const std::string& nrrd_path,
                 const std::string& json_path) {
    field.validate();
    const GridSpec& g = field.control_grid;
    std::ofstream out(nrrd_path, std::ios::binary);
    if (!out) throw std::runtime_error("field: cannot write " + nrrd_path);
    out << "NRRD0004\n";
    out << "type: float\n";
    out << "dimension: 4\n";
    out << "sizes: 3 " << g.sizes[0] << " " << g.sizes[1] << " " << g.sizes[2] << "\n";
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "space directions: none (%.17g,0,0) (0,%.17g,0) (0,0,%.17g)\n", g.spacing[0],
                  g.spacing[1], g.spacing[2]);
    out << buf;
    std::snprintf(buf, sizeof(buf), "space origin: (%.17g,%.17g,%.17g)\n", g.origin[0], g.origin[1],
                  g.origin[2]);
    out << buf;
    out << "endian: little\nencoding: raw\n\n";
    std::vector<std::uint8_t> payload(field.displacements.size() * 12);
    std::size_t o = 0;
    for (const Vec3& d : field.displacements)
        for (int a = 0; a < 3; ++a) {
            float f = static_cast<float>(d[a]);
            std::uint32_t u;
            static_assert(sizeof(f) == 4);
            std::memcpy(&u, &f, 4);
            payload[o++] = static_cast<std::uint8_t>(u & 0xff);
            payload[o++] = static_cast<std::uint8_t>((u >> 8) & 0xff);
            payload[o++] = static_cast<std::uint8_t>((u >> 16) & 0xff);
            payload[o++] = static_cast<std::uint8_t>((u >> 24) & 0xff);
        }
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size()));

    nlohmann::ordered_json meta;
    meta["control_grid"] = {
        {"sizes", g.sizes}, {"spacing", g.spacing}, {"origin", g.origin}};
    std::ofstream js(json_path);
    if (!js) throw std::runtime_error("field: cannot write " + json_path);
    js << meta.dump(2) << "\n";
}

DeformationField read_field(const std::string& nrrd_path) {
    std::ifstream in(nrrd_path, std::ios::binary);
    if (!in) throw std::runtime_error("field: cannot open " + nrrd_path);
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "NRRD0004") throw std::runtime_error("field: bad magic");
    DeformationField f;
    int sizes[4] = {0, 0, 0, 0};
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) break;
        auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        std::string key = line.substr(0, colon);
        std::string val = line.substr(colon + 1);
        if (key == "sizes") {
            std::istringstream is(val);
            is >> sizes[0] >> sizes[1] >> sizes[2] >> sizes[3];
        } else if (key == "space directions") {
            // none (sx,0,0) (0,sy,0) (0,0,sz)
            std::istringstream is(val);
            std::string tok;
            int axis = 0;
            while (is >> tok) {
                if (tok == "none") continue;
                double a = 0, b = 0, c = 0;
                std::sscanf(tok.c_str(), "(%lf,%lf,%lf)", &a, &b, &c);
                f.control_grid.spacing[axis] = (axis == 0) ? a : (axis == 1 ? b : c);
                ++axis;
            }
        } else if (key == "space origin") {
            std::sscanf(val.c_str(), " (%lf,%lf,%lf)", &f.control_grid.origin[0],
                        &f.control_grid.origin[1], &f.control_grid.origin[2]);
        }
    }
    if (sizes[0] != 3) throw std::runtime_error("field: first axis must have size 3");
    f.control_grid.sizes = {sizes[1], sizes[2], sizes[3]};
    std::size_t n = f.control_grid.voxel_count();
    std::vector<std::uint8_t> payload(n * 12);
    in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    if (static_cast<std::size_t>(in.gcount()) != payload.size())
        throw std::runtime_error("field: payload size mismatch");
    f.displacements.resize(n);
    std::size_t o = 0;
    for (Vec3& d : f.displacements)
        for (int a = 0; a < 3; ++a) {
            std::uint32_t u = payload[o] | (payload[o + 1] << 8) | (payload[o + 2] << 16) |
                              (static_cast<std::uint32_t>(payload[o + 3]) << 24);
            float fl;
            std::memcpy(&fl, &u, 4);
            d[a] = fl;
            o += 4;
        }
    f.validate();
    return f;
}

} // namespace pcat
