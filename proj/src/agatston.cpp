#include "pcat/agatston.hpp"

#include <algorithm>
#include <stdexcept>

namespace pcat {

int agatston_weight(double max_hu) {
    if (max_hu >= 400.0) return 4;
    if (max_hu >= 300.0) return 3;
    if (max_hu >= 200.0) return 2;
    return 1;
}

AgatstonResult agatston_score(const Volume& vol, const AgatstonParams& params) {
    vol.validate();
    if (params.gate && !params.gate->grid.congruent(vol.grid))
        throw std::runtime_error("agatston: gate mask grid not congruent to volume");

    const GridSpec& g = vol.grid;
    const int nx = g.sizes[0], ny = g.sizes[1];
    const double pixel_area = g.spacing[0] * g.spacing[1];

    auto qualifies = [&](double v) {
        return params.strict_greater ? v > params.threshold_hu : v >= params.threshold_hu;
    };

    AgatstonResult result;
    std::vector<int> comp(static_cast<std::size_t>(nx) * ny);
    std::vector<std::size_t> stack;

    for (int k = 0; k < g.sizes[2]; ++k) {
        std::fill(comp.begin(), comp.end(), -1);
        int next_comp = 0;
        // scanline order makes lesion ordering deterministic
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                std::size_t p = static_cast<std::size_t>(j) * nx + i;
                if (comp[p] != -1) continue;
                if (!qualifies(vol.at(i, j, k))) continue;
                if (params.gate && params.gate->at(i, j, k) == 0) continue;

                CalciumLesion lesion;
                lesion.slice_index = k;
                comp[p] = next_comp;
                stack.clear();
                stack.push_back(p);
                while (!stack.empty()) {
                    std::size_t q = stack.back();
                    stack.pop_back();
                    int qi = static_cast<int>(q % nx), qj = static_cast<int>(q / nx);
                    double v = vol.at(qi, qj, k);
                    lesion.voxels.push_back({qi, qj, k});
                    lesion.max_hu = std::max(lesion.max_hu, v);
                    for (int dj = -1; dj <= 1; ++dj) {
                        for (int di = -1; di <= 1; ++di) {
                            if (!di && !dj) continue;
                            if (!params.connectivity8 && di != 0 && dj != 0) continue;
                            int ni = qi + di, nj = qj + dj;
                            if (ni < 0 || ni >= nx || nj < 0 || nj >= ny) continue;
                            std::size_t np = static_cast<std::size_t>(nj) * nx + ni;
                            if (comp[np] != -1) continue;
                            if (!qualifies(vol.at(ni, nj, k))) continue;
                            if (params.gate && params.gate->at(ni, nj, k) == 0) continue;
                            comp[np] = next_comp;
                            stack.push_back(np);
                        }
                    }
                }
                ++next_comp;
                if (static_cast<int>(lesion.voxels.size()) < params.min_voxels) continue;
                lesion.area_mm2 = static_cast<double>(lesion.voxels.size()) * pixel_area;
                lesion.weight = agatston_weight(lesion.max_hu);
                lesion.contribution = lesion.area_mm2 * lesion.weight;
                result.total += lesion.contribution;
                result.lesions.push_back(std::move(lesion));
            }
        }
    }
    return result;
}

} // namespace pcat
