// Core volume / mask data types, NRRD-subset file I/O, resampling,
// HU windowing and axial median filtering.
#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcat {

using Vec3 = std::array<double, 3>;
using Index3 = std::array<int, 3>;

// Voxel grid geometry. Physical position of voxel (i,j,k) is
// origin + (i*spacing_x, j*spacing_y, k*spacing_z); origin is the center
// of the first voxel, matching NRRD "space origin" semantics.
struct GridSpec {
    Index3 sizes{0, 0, 0};
    Vec3 spacing{1.0, 1.0, 1.0};
    Vec3 origin{0.0, 0.0, 0.0};

    std::size_t voxel_count() const {
        return static_cast<std::size_t>(sizes[0]) * sizes[1] * sizes[2];
    }
    double voxel_volume_mm3() const { return spacing[0] * spacing[1] * spacing[2]; }
    Vec3 position(int i, int j, int k) const {
        return {origin[0] + i * spacing[0], origin[1] + j * spacing[1], origin[2] + k * spacing[2]};
    }
    // physical point -> continuous voxel coordinate
    Vec3 to_voxel(const Vec3& p) const {
        return {(p[0] - origin[0]) / spacing[0], (p[1] - origin[1]) / spacing[1],
                (p[2] - origin[2]) / spacing[2]};
    }
    bool congruent(const GridSpec& o, double tol = 1e-9) const;
    void validate() const; // throws on non-positive sizes/spacing
};

// Scalar 3D image in HU (or unitless for wavelet subbands).
// Values are stored x-fastest: index = i + sizes[0]*(j + sizes[1]*k).
struct Volume {
    GridSpec grid;
    std::vector<double> values;

    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(grid.sizes[0]) *
                   (static_cast<std::size_t>(j) + static_cast<std::size_t>(grid.sizes[1]) * k);
    }
    double at(int i, int j, int k) const { return values[index(i, j, k)]; }
    double& at(int i, int j, int k) { return values[index(i, j, k)]; }

    // trilinear sample at a physical point; coordinates outside the domain
    // are clamped to the nearest edge
    double sample(const Vec3& p) const;

    void validate() const; // throws on size mismatch / non-finite values
};

// Small-integer label image on the same kind of grid (0 = background,
// 1 = LAD, 2 = LCX, 3 = RCA; other codes allowed for lesions).
struct LabelMask {
    GridSpec grid;
    std::vector<std::uint8_t> labels;

    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(grid.sizes[0]) *
                   (static_cast<std::size_t>(j) + static_cast<std::size_t>(grid.sizes[1]) * k);
    }
    std::uint8_t at(int i, int j, int k) const { return labels[index(i, j, k)]; }
    std::uint8_t& at(int i, int j, int k) { return labels[index(i, j, k)]; }

    void validate() const;
};

constexpr std::uint8_t kLabelBackground = 0;
constexpr std::uint8_t kLabelLAD = 1;
constexpr std::uint8_t kLabelLCX = 2;
constexpr std::uint8_t kLabelRCA = 3;

const char* artery_name(std::uint8_t label); // "LAD"/"LCX"/"RCA"
std::uint8_t artery_label(const std::string& name);

// NRRD-subset scalar storage type for write_volume.
enum class NrrdType { Short, Float };

// NRRD-subset I/O. Accepted header: magic NRRD0004, type short|float
// (uchar for masks), dimension 3, sizes, diagonal space directions,
// space origin, endian little, encoding raw; one blank line, raw payload.
// Parse errors throw std::runtime_error naming the offending field.
Volume read_volume(const std::string& path);
void write_volume(const Volume& vol, const std::string& path, NrrdType type = NrrdType::Float);
LabelMask read_mask(const std::string& path);
void write_mask(const LabelMask& mask, const std::string& path);

// Trilinear resampling of vol onto the target grid; points outside the
// source domain take the nearest-edge value.
Volume resample_to_grid(const Volume& vol, const GridSpec& target);

// Nearest-neighbor resampling for masks (no new label values).
LabelMask resample_mask_nn(const LabelMask& mask, const GridSpec& target);

// Clamp every value to [lo, hi]. lo >= hi throws std::invalid_argument.
Volume window_hu(const Volume& vol, double lo, double hi);

// 3x3 median filter applied per axial (constant-z) slice; borders use
// edge replication; the z axis is untouched.
Volume median_filter_axial(const Volume& vol);

} // namespace pcat
