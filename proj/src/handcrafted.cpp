#include "pcat/handcrafted.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pcat {

std::array<double, 8> hu_histogram8(const PCATRegion& region) {
    if (region.values.empty()) throw std::runtime_error("hu_histogram8: empty region");
    std::array<double, 8> h{};
    for (double v : region.values) {
        int bin = static_cast<int>(std::floor((v - kFatWindowLo) / 20.0));
        bin = std::clamp(bin, 0, 7); // -30 itself lands in the right-closed last bin
        h[static_cast<std::size_t>(bin)] += 1.0;
    }
    double n = static_cast<double>(region.values.size());
    for (double& p : h) p /= n;
    return h;
}

double percentile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw std::runtime_error("percentile: empty data");
    if (sorted.size() == 1) return sorted[0];
    double rank = (static_cast<double>(sorted.size()) - 1.0) * p / 100.0;
    std::size_t lo = static_cast<std::size_t>(std::floor(rank));
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    double t = rank - static_cast<double>(lo);
    return sorted[lo] + t * (sorted[hi] - sorted[lo]);
}

const std::vector<std::string>& handcrafted_feature_names() {
    static const std::vector<std::string> names = {
        "mean_hu",
        "skewness",
        "kurtosis",
        "std_hu",
        "median_hu",
        "iqr_hu",
        "hist_entropy_bits",
        "area_min_mm2",
        "area_max_mm2",
        "area_mean_mm2",
        "area_std_mm2",
        "area_median_mm2",
        "volume_cm3",
        "area_nonzero_fraction",
        "p_hu_n190_n170",
        "p_hu_n170_n150",
        "p_hu_n150_n130",
        "p_hu_n130_n110",
        "p_hu_n110_n90",
        "p_hu_n90_n70",
        "p_hu_n70_n50",
        "p_hu_n50_n30",
    };
    return names;
}

FeatureVector handcrafted_vector(const PCATRegion& region, double slice_thickness_mm) {
    if (region.values.empty()) throw std::runtime_error("handcrafted_vector: empty region");
    if (!(slice_thickness_mm > 0.0)) throw std::invalid_argument("handcrafted_vector: bad slice thickness");

    const auto& names = handcrafted_feature_names();
    const std::size_t n = region.values.size();

    double mean = 0.0;
    for (double v : region.values) mean += v;
    mean /= static_cast<double>(n);

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : region.values) {
        double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);

    std::vector<double> sorted = region.values;
    std::sort(sorted.begin(), sorted.end());

    auto hist = hu_histogram8(region);
    double entropy = 0.0;
    for (double p : hist)
        if (p > 0.0) entropy -= p * std::log2(p);

    const auto& areas = region.slice_areas_mm2;
    if (areas.empty()) throw std::runtime_error("handcrafted_vector: region has no disk slices");
    double a_min = areas[0], a_max = areas[0], a_mean = 0.0;
    std::size_t nonzero = 0;
    for (double a : areas) {
        a_min = std::min(a_min, a);
        a_max = std::max(a_max, a);
        a_mean += a;
        if (a > 0.0) ++nonzero;
    }
    a_mean /= static_cast<double>(areas.size());
    double a_var = 0.0;
    for (double a : areas) a_var += (a - a_mean) * (a - a_mean);
    a_var /= static_cast<double>(areas.size());
    std::vector<double> areas_sorted = areas;
    std::sort(areas_sorted.begin(), areas_sorted.end());

    double total_area = 0.0;
    for (double a : areas) total_area += a;
    double volume_cm3 = total_area * slice_thickness_mm / 1000.0;

    FeatureVector fv;
    fv.artery = region.artery;
    fv.push(names[0], mean);
    if (n < 2 || m2 <= 0.0) {
        fv.push_undefined(names[1]);
        fv.push_undefined(names[2]);
    } else {
        fv.push(names[1], m3 / std::pow(m2, 1.5));
        fv.push(names[2], m4 / (m2 * m2));
    }
    if (n < 2) fv.push_undefined(names[3]);
    else fv.push(names[3], std::sqrt(m2));
    fv.push(names[4], percentile_sorted(sorted, 50.0));
    if (n < 2) fv.push_undefined(names[5]);
    else fv.push(names[5], percentile_sorted(sorted, 75.0) - percentile_sorted(sorted, 25.0));
    fv.push(names[6], entropy);
    fv.push(names[7], a_min);
    fv.push(names[8], a_max);
    fv.push(names[9], a_mean);
    fv.push(names[10], std::sqrt(a_var));
    fv.push(names[11], percentile_sorted(areas_sorted, 50.0));
    fv.push(names[12], volume_cm3);
    fv.push(names[13], static_cast<double>(nonzero) / static_cast<double>(areas.size()));
    for (std::size_t b = 0; b < 8; ++b) fv.push(names[14 + b], hist[b]);
    return fv;
}

} // namespace pcat
