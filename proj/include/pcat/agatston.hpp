// Conventional Agatston calcium scoring on CTCS volumes.
#pragma once

#include <vector>

#include "pcat/volume.hpp"

namespace pcat {

struct CalciumLesion {
    int slice_index = 0;
    std::vector<Index3> voxels;
    double area_mm2 = 0.0;
    double max_hu = 0.0;
    int weight = 0; // 1..4 density tier
    double contribution = 0.0;
};

struct AgatstonParams {
    double threshold_hu = 130.0;
    bool strict_greater = true; // "> 130" as stated; false gives the >= variant
    bool connectivity8 = true;  // per-slice 8-connectivity (false: 4)
    int min_voxels = 3;
    // optional gating: nonzero mask labels select scored voxels
    const LabelMask* gate = nullptr;
};

struct AgatstonResult {
    double total = 0.0;
    std::vector<CalciumLesion> lesions; // ordered by (slice, scanline of first voxel)
};

// Per axial slice, connected components of voxels above the threshold;
// components of >= min_voxels become lesions scored area * weight with
// weight 1: (130,200), 2: [200,300), 3: [300,400), 4: >= 400 from max HU.
AgatstonResult agatston_score(const Volume& vol, const AgatstonParams& params = {});

int agatston_weight(double max_hu);

} // namespace pcat
