#include "pcat/pcat_extraction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace pcat {

Centerline select_segment(const Centerline& cl, const SegmentRules& rules) {
    cl.validate();
    double start = rules.start_offset_mm;
    double end;
    if (cl.artery == kLabelRCA) {
        start += rules.rca_skip_mm;
        end = rules.rca_trim_to_length ? rules.start_offset_mm + rules.length_mm
                                       : start + rules.length_mm;
    } else {
        end = start + rules.length_mm;
    }
    if (end <= start) throw std::runtime_error("select_segment: empty arc span");
    if (cl.total_length() + 1e-9 < end) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "select_segment: centerline too short for %s (need %.1f mm, have %.2f mm)",
                      artery_name(cl.artery), end, cl.total_length());
        throw std::runtime_error(buf);
    }

    std::vector<Vec3> pts;
    int n = static_cast<int>(std::floor((end - start) / rules.step_mm + 1e-9));
    pts.reserve(n + 1);
    for (int i = 0; i <= n; ++i) pts.push_back(cl.at_arc(start + i * rules.step_mm));
    // keep the exact endpoint when the span is not a multiple of the step
    if (start + n * rules.step_mm < end - 1e-9) pts.push_back(cl.at_arc(end));
    return make_centerline(cl.artery, std::move(pts));
}

CircleFit fit_circle_axial(const std::vector<std::array<double, 2>>& voxel_centers_mm,
                           double pixel_area_mm2) {
    if (voxel_centers_mm.empty()) throw std::runtime_error("fit_circle_axial: no lumen in slice");
    CircleFit fit;
    for (const auto& p : voxel_centers_mm) {
        fit.cx += p[0];
        fit.cy += p[1];
    }
    fit.cx /= static_cast<double>(voxel_centers_mm.size());
    fit.cy /= static_cast<double>(voxel_centers_mm.size());
    double area = pixel_area_mm2 * static_cast<double>(voxel_centers_mm.size());
    fit.radius = std::sqrt(area / std::numbers::pi);
    return fit;
}

DiskSet build_disk_set(const LabelMask& lumen, const Centerline& segment, const GridSpec& grid) {
    lumen.validate();
    segment.validate();
    grid.validate();
    if (!lumen.grid.congruent(grid))
        throw std::runtime_error("build_disk_set: lumen mask grid not congruent to target grid");

    double zmin = std::numeric_limits<double>::infinity();
    double zmax = -std::numeric_limits<double>::infinity();
    for (const auto& p : segment.points) {
        zmin = std::min(zmin, p[2]);
        zmax = std::max(zmax, p[2]);
    }

    const double pixel_area = grid.spacing[0] * grid.spacing[1];
    const double isolation_radius = 5.0; // mm, in-plane, isolates the target artery

    struct PendingDisk {
        int slice;
        bool has_lumen;
        CircleFit fit;
        Vec3 seg_point;
    };
    std::vector<PendingDisk> pending;

    for (int k = 0; k < grid.sizes[2]; ++k) {
        double zc = grid.origin[2] + k * grid.spacing[2];
        if (zc < zmin - 1e-9 || zc > zmax + 1e-9) continue;

        // segment point closest in z to this slice center
        Vec3 seg_pt = segment.points.front();
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : segment.points) {
            double d = std::abs(p[2] - zc);
            if (d < best) {
                best = d;
                seg_pt = p;
            }
        }

        std::vector<std::array<double, 2>> centers;
        for (int j = 0; j < grid.sizes[1]; ++j) {
            for (int i = 0; i < grid.sizes[0]; ++i) {
                if (lumen.at(i, j, k) != segment.artery) continue;
                double x = grid.origin[0] + i * grid.spacing[0];
                double y = grid.origin[1] + j * grid.spacing[1];
                double dx = x - seg_pt[0], dy = y - seg_pt[1];
                if (dx * dx + dy * dy <= isolation_radius * isolation_radius)
                    centers.push_back({x, y});
            }
        }

        PendingDisk pd;
        pd.slice = k;
        pd.seg_point = seg_pt;
        pd.has_lumen = !centers.empty();
        if (pd.has_lumen) pd.fit = fit_circle_axial(centers, pixel_area);
        pending.push_back(pd);
    }

    DiskSet out;
    out.artery = segment.artery;
    for (std::size_t idx = 0; idx < pending.size(); ++idx) {
        const auto& pd = pending[idx];
        AxialDisk d;
        d.slice_index = pd.slice;
        if (pd.has_lumen) {
            d.center_x = pd.fit.cx;
            d.center_y = pd.fit.cy;
            d.lumen_radius = pd.fit.radius;
        } else {
            // nearest populated slice supplies the radius
            double r = 0.0;
            int best_dist = std::numeric_limits<int>::max();
            for (std::size_t j = 0; j < pending.size(); ++j) {
                if (!pending[j].has_lumen) continue;
                int dist = std::abs(pending[j].slice - pd.slice);
                if (dist < best_dist) {
                    best_dist = dist;
                    r = pending[j].fit.radius;
                }
            }
            if (best_dist == std::numeric_limits<int>::max())
                throw std::runtime_error("build_disk_set: no lumen voxels in any segment slice for " +
                                         std::string(artery_name(segment.artery)));
            d.center_x = pd.seg_point[0];
            d.center_y = pd.seg_point[1];
            d.lumen_radius = r;
            d.synthesized = true;
        }
        d.disk_radius = std::min(2.0 * d.lumen_radius, kMaxDiskRadius);
        out.disks.push_back(d);
    }
    if (out.disks.empty())
        throw std::runtime_error("build_disk_set: segment intersects no axial slice");
    return out;
}

PCATRegion extract_pcat(const Volume& vol, const DiskSet& disks, double fat_lo, double fat_hi) {
    vol.validate();
    if (disks.disks.empty()) throw std::runtime_error("extract_pcat: empty disk set");
    if (!(fat_lo < fat_hi)) throw std::invalid_argument("extract_pcat: bad fat window");

    const GridSpec& g = vol.grid;
    const double pixel_area = g.spacing[0] * g.spacing[1];

    // Filtering a crop around the disks with a 1-voxel in-plane margin
    // reproduces the whole-volume median filter exactly at every in-disk
    // voxel (the filter reach is 1 and edge replication only applies at
    // true volume edges).
    int ilo = g.sizes[0], ihi = -1, jlo = g.sizes[1], jhi = -1, klo = g.sizes[2], khi = -1;
    for (const AxialDisk& d : disks.disks) {
        ilo = std::min(ilo, static_cast<int>(std::floor((d.center_x - d.disk_radius - g.origin[0]) / g.spacing[0])) - 1);
        ihi = std::max(ihi, static_cast<int>(std::ceil((d.center_x + d.disk_radius - g.origin[0]) / g.spacing[0])) + 1);
        jlo = std::min(jlo, static_cast<int>(std::floor((d.center_y - d.disk_radius - g.origin[1]) / g.spacing[1])) - 1);
        jhi = std::max(jhi, static_cast<int>(std::ceil((d.center_y + d.disk_radius - g.origin[1]) / g.spacing[1])) + 1);
        klo = std::min(klo, d.slice_index);
        khi = std::max(khi, d.slice_index);
    }
    ilo = std::clamp(ilo, 0, g.sizes[0] - 1);
    ihi = std::clamp(ihi, 0, g.sizes[0] - 1);
    jlo = std::clamp(jlo, 0, g.sizes[1] - 1);
    jhi = std::clamp(jhi, 0, g.sizes[1] - 1);
    klo = std::clamp(klo, 0, g.sizes[2] - 1);
    khi = std::clamp(khi, 0, g.sizes[2] - 1);

    Volume cropped;
    cropped.grid.sizes = {ihi - ilo + 1, jhi - jlo + 1, khi - klo + 1};
    cropped.grid.spacing = g.spacing;
    cropped.grid.origin = {g.origin[0] + ilo * g.spacing[0], g.origin[1] + jlo * g.spacing[1],
                           g.origin[2] + klo * g.spacing[2]};
    cropped.values.resize(cropped.grid.voxel_count());
    {
        std::size_t idx = 0;
        for (int k = klo; k <= khi; ++k)
            for (int j = jlo; j <= jhi; ++j)
                for (int i = ilo; i <= ihi; ++i) cropped.values[idx++] = vol.at(i, j, k);
    }
    Volume filtered_crop = median_filter_axial(cropped);
    auto filtered_at = [&](int i, int j, int k) {
        return filtered_crop.at(i - ilo, j - jlo, k - klo);
    };

    PCATRegion region;
    region.artery = disks.artery;
    region.mask.grid = g;
    region.mask.labels.assign(g.voxel_count(), 0);

    for (const AxialDisk& d : disks.disks) {
        int k = d.slice_index;
        if (k < 0 || k >= g.sizes[2]) continue;
        std::size_t count = 0;
        // bound the scan to the disk's bounding box
        int i0 = std::max(0, static_cast<int>(std::floor((d.center_x - d.disk_radius - g.origin[0]) / g.spacing[0])));
        int i1 = std::min(g.sizes[0] - 1, static_cast<int>(std::ceil((d.center_x + d.disk_radius - g.origin[0]) / g.spacing[0])));
        int j0 = std::max(0, static_cast<int>(std::floor((d.center_y - d.disk_radius - g.origin[1]) / g.spacing[1])));
        int j1 = std::min(g.sizes[1] - 1, static_cast<int>(std::ceil((d.center_y + d.disk_radius - g.origin[1]) / g.spacing[1])));
        for (int j = j0; j <= j1; ++j) {
            double y = g.origin[1] + j * g.spacing[1];
            for (int i = i0; i <= i1; ++i) {
                double x = g.origin[0] + i * g.spacing[0];
                double dx = x - d.center_x, dy = y - d.center_y;
                if (dx * dx + dy * dy > d.disk_radius * d.disk_radius) continue;
                double hu = filtered_at(i, j, k);
                if (hu < fat_lo || hu > fat_hi) continue;
                region.mask.at(i, j, k) = 1;
                region.values.push_back(hu);
                ++count;
            }
        }
        region.slice_areas_mm2.push_back(static_cast<double>(count) * pixel_area);
        region.slice_indices.push_back(k);
    }

    if (region.values.empty()) throw std::runtime_error("extract_pcat: empty PCAT region");
    return region;
}

} // namespace pcat
