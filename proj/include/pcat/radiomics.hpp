// 536-feature radiomics engine: 16-level discretization, first-order,
// shape, GLCM/GLRLM texture (GLDM/NGTDM as the extended set) and a
// single-level stationary 3D Haar wavelet layer.
//
// Feature definitions are fixed by this module's dictionary; levels run
// 1..16 and texture matrices use the 13 unique 3D directions at Chebyshev
// distance 1 unless a test supplies its own direction list.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pcat/features.hpp"
#include "pcat/pcat_extraction.hpp"
#include "pcat/volume.hpp"

namespace pcat {

constexpr int kGrayLevels = 16;

// Gray levels 1..16 for in-mask voxels; 0 marks out-of-mask.
struct DiscretizedROI {
    GridSpec grid;
    std::vector<std::uint8_t> levels; // 0 outside the mask
    double value_min = 0.0, value_max = 0.0;
    std::size_t voxel_count = 0;

    std::uint8_t at(int i, int j, int k) const {
        return levels[static_cast<std::size_t>(i) +
                      static_cast<std::size_t>(grid.sizes[0]) *
                          (static_cast<std::size_t>(j) +
                           static_cast<std::size_t>(grid.sizes[1]) * k)];
    }
};

// level(v) = min(16, floor((v - min) / ((max - min)/16)) + 1);
// constant regions map to level 1.
DiscretizedROI discretize16(const LabelMask& mask, const Volume& vol);
DiscretizedROI discretize16(const PCATRegion& region);
int discretize16_level(double v, double vmin, double vmax);

// The 13 unique 3D offsets (one per opposite pair of the 26-neighborhood).
const std::vector<Index3>& texture_directions13();

// Per-family ordered feature names.
const std::vector<std::string>& glcm_feature_names();       // 24
const std::vector<std::string>& glrlm_feature_names();      // 16
const std::vector<std::string>& gldm_feature_names();       // 14
const std::vector<std::string>& ngtdm_feature_names();      // 5
const std::vector<std::string>& first_order_feature_names();// 18
const std::vector<std::string>& shape_feature_names();      // 14

// GLCM: symmetric co-occurrence per direction, normalized, features
// averaged over directions that contain at least one voxel pair.
// All directions empty -> every feature undefined-flagged.
FeatureVector glcm_features(const DiscretizedROI& roi);
FeatureVector glcm_features(const DiscretizedROI& roi, const std::vector<Index3>& directions);

// GLRLM: maximal equal-level in-mask runs per direction, features
// averaged over directions.
FeatureVector glrlm_features(const DiscretizedROI& roi);
FeatureVector glrlm_features(const DiscretizedROI& roi, const std::vector<Index3>& directions);

// GLDM: dependence size = 1 + number of equal-level in-mask 26-neighbors.
FeatureVector gldm_features(const DiscretizedROI& roi);

// NGTDM over the 26-neighborhood mean of in-mask neighbors; voxels with no
// in-mask neighbor are excluded; coarseness denominator 0 is capped at 1e6.
FeatureVector ngtdm_features(const DiscretizedROI& roi);

// 18 first-order statistics of raw values. Entropy/uniformity use the
// 16-level discretization of the value range.
FeatureVector first_order_features(const std::vector<double>& values, double voxel_volume_mm3);

// 14 shape descriptors of a binary mask (any nonzero label).
// Surface area counts exposed voxel faces; mesh volume is reported equal
// to the voxel volume; axis lengths come from the PCA of voxel centers.
FeatureVector shape_features(const LabelMask& mask);

// Single-level stationary separable 3D Haar transform. Subband labels
// give the per-axis filter in (x, y, z) order; low = (1/sqrt2)[1, 1],
// high = (1/sqrt2)[1, -1], taken over samples (i, i+1).
enum class WaveletPad { Replicate, Wrap }; // Wrap exists for energy tests
struct WaveletBank {
    static constexpr std::array<const char*, 8> kLabels = {"LLL", "HLL", "LHL", "HHL",
                                                           "LLH", "HLH", "LHH", "HHH"};
    std::array<Volume, 8> subbands; // order matches kLabels
    const Volume& by_label(const std::string& label) const;
};
WaveletBank wavelet8(const Volume& vol, WaveletPad pad = WaveletPad::Replicate);

// Canonical fixed subband order of the 536-vector.
const std::vector<std::string>& wavelet_subband_order(); // LLL,LLH,LHL,LHH,HLL,HLH,HHL,HHH

// The canonical 536-entry vector: 14 shape + 18 first-order + 24 GLCM +
// 16 GLRLM on the original values, then 18 + 24 + 16 per wavelet subband
// (rediscretized per subband), in fixed dictionary order.
// vol is the same volume extract_pcat consumed; the 3x3 median filter and
// the wavelet transform are evaluated on a crop around the mask whose
// margin makes the result identical to a full-volume computation.
FeatureVector radiomics_vector(const PCATRegion& region, const Volume& vol);

// Extended set: 14 GLDM + 5 NGTDM on the original discretization.
FeatureVector extended_texture_vector(const PCATRegion& region);

// Full ordered names of the 536-entry dictionary.
const std::vector<std::string>& radiomics_feature_names();

} // namespace pcat
