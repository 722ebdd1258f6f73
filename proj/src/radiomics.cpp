#include "pcat/radiomics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace pcat {

namespace {

constexpr double kLog2e = 1.4426950408889634074; // 1/ln(2)

double log2_safe(double p) { return std::log(p) * kLog2e; }

// Sorting before summation makes direction averages exactly invariant to
// permutations of the direction list.
double mean_sorted(std::vector<double> vals) {
    std::sort(vals.begin(), vals.end());
    double s = 0.0;
    for (double v : vals) s += v;
    return s / static_cast<double>(vals.size());
}

// Cyclic Jacobi eigenvalues of a symmetric matrix (row-major, n x n).
std::vector<double> jacobi_eigenvalues(std::vector<double> a, int n) {
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double apq = a[p * n + q];
                if (std::abs(apq) < 1e-300) continue;
                double app = a[p * n + p], aqq = a[q * n + q];
                double theta = (aqq - app) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a[k * n + p], akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a[p * n + k], aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (int i = 0; i < n; ++i) eig[i] = a[i * n + i];
    return eig;
}

struct Moments {
    double mean = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;
};

Moments central_moments(const std::vector<double>& v) {
    Moments m;
    double n = static_cast<double>(v.size());
    for (double x : v) m.mean += x;
    m.mean /= n;
    for (double x : v) {
        double d = x - m.mean;
        double d2 = d * d;
        m.m2 += d2;
        m.m3 += d2 * d;
        m.m4 += d2 * d2;
    }
    m.m2 /= n;
    m.m3 /= n;
    m.m4 /= n;
    return m;
}

} // namespace

// ---------------------------------------------------------------------------
// discretization

int discretize16_level(double v, double vmin, double vmax) {
    if (vmax <= vmin) return 1;
    double width = (vmax - vmin) / static_cast<double>(kGrayLevels);
    int level = static_cast<int>(std::floor((v - vmin) / width)) + 1;
    return std::clamp(level, 1, kGrayLevels);
}

DiscretizedROI discretize16(const LabelMask& mask, const Volume& vol) {
    mask.validate();
    vol.validate();
    if (!mask.grid.congruent(vol.grid))
        throw std::runtime_error("discretize16: mask and volume grids differ");

    DiscretizedROI roi;
    roi.grid = mask.grid;
    roi.levels.assign(mask.labels.size(), 0);

    double vmin = std::numeric_limits<double>::infinity();
    double vmax = -std::numeric_limits<double>::infinity();
    std::size_t count = 0;
    for (std::size_t i = 0; i < mask.labels.size(); ++i) {
        if (!mask.labels[i]) continue;
        vmin = std::min(vmin, vol.values[i]);
        vmax = std::max(vmax, vol.values[i]);
        ++count;
    }
    if (count == 0) throw std::runtime_error("discretize16: empty mask");
    roi.value_min = vmin;
    roi.value_max = vmax;
    roi.voxel_count = count;
    for (std::size_t i = 0; i < mask.labels.size(); ++i)
        if (mask.labels[i])
            roi.levels[i] = static_cast<std::uint8_t>(discretize16_level(vol.values[i], vmin, vmax));
    return roi;
}

DiscretizedROI discretize16(const PCATRegion& region) {
    // region.values are stored in grid scan order restricted to the mask
    Volume vol;
    vol.grid = region.mask.grid;
    vol.values.assign(region.mask.labels.size(), 0.0);
    std::size_t vi = 0;
    for (std::size_t i = 0; i < region.mask.labels.size(); ++i)
        if (region.mask.labels[i]) vol.values[i] = region.values[vi++];
    if (vi != region.values.size())
        throw std::runtime_error("discretize16: region value/mask mismatch");
    return discretize16(region.mask, vol);
}

const std::vector<Index3>& texture_directions13() {
    static const std::vector<Index3> dirs = {
        {1, 0, 0},  {0, 1, 0},  {0, 0, 1},
        {1, 1, 0},  {1, -1, 0}, {1, 0, 1},  {1, 0, -1},
        {0, 1, 1},  {0, 1, -1},
        {1, 1, 1},  {1, 1, -1}, {1, -1, 1}, {1, -1, -1},
    };
    return dirs;
}

// ---------------------------------------------------------------------------
// GLCM

const std::vector<std::string>& glcm_feature_names() {
    static const std::vector<std::string> names = {
        "autocorrelation", "joint_average", "cluster_prominence", "cluster_shade",
        "cluster_tendency", "contrast", "correlation", "difference_average",
        "difference_entropy", "difference_variance", "joint_energy", "joint_entropy",
        "imc1", "imc2", "idm", "idmn", "id", "idn", "inverse_variance",
        "max_correlation_coefficient", "maximum_probability", "sum_average",
        "sum_entropy", "sum_squares",
    };
    return names;
}

namespace {

std::vector<double> glcm_single_direction_features(const double* p) {
    const int N = kGrayLevels;
    double px[kGrayLevels] = {0};
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) px[i] += p[i * N + j];

    double mu = 0.0;
    for (int i = 0; i < N; ++i) mu += (i + 1) * px[i];
    double var = 0.0;
    for (int i = 0; i < N; ++i) var += (i + 1 - mu) * (i + 1 - mu) * px[i];

    double psum[2 * kGrayLevels + 1] = {0};  // index k = i+j, 2..32
    double pdiff[kGrayLevels] = {0};         // index k = |i-j|, 0..15
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            psum[i + j + 2] += p[i * N + j];
            pdiff[std::abs(i - j)] += p[i * N + j];
        }

    double autocorr = 0.0, prominence = 0.0, shade = 0.0, tendency = 0.0, contrast = 0.0;
    double joint_energy = 0.0, joint_entropy = 0.0, maxprob = 0.0;
    double hxy1 = 0.0, hxy2 = 0.0;
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            double v = p[i * N + j];
            double gi = i + 1, gj = j + 1;
            autocorr += gi * gj * v;
            double cm = gi + gj - 2.0 * mu;
            tendency += cm * cm * v;
            shade += cm * cm * cm * v;
            prominence += cm * cm * cm * cm * v;
            contrast += (gi - gj) * (gi - gj) * v;
            joint_energy += v * v;
            maxprob = std::max(maxprob, v);
            if (v > 0.0) joint_entropy -= v * log2_safe(v);
            double pij = px[i] * px[j];
            if (v > 0.0 && pij > 0.0) hxy1 -= v * log2_safe(pij);
            if (pij > 0.0) hxy2 -= pij * log2_safe(pij);
        }
    }

    double hx = 0.0;
    for (int i = 0; i < N; ++i)
        if (px[i] > 0.0) hx -= px[i] * log2_safe(px[i]);

    double correlation = 1.0; // convention for a degenerate (single-level) matrix
    if (var > 1e-14) correlation = (autocorr - mu * mu) / var;

    double diff_avg = 0.0, diff_entropy = 0.0;
    for (int k = 0; k < N; ++k) {
        diff_avg += k * pdiff[k];
        if (pdiff[k] > 0.0) diff_entropy -= pdiff[k] * log2_safe(pdiff[k]);
    }
    double diff_var = 0.0;
    for (int k = 0; k < N; ++k) diff_var += (k - diff_avg) * (k - diff_avg) * pdiff[k];

    double imc1 = 0.0;
    if (hx > 0.0) imc1 = (joint_entropy - hxy1) / hx;
    double imc2 = 0.0;
    {
        double inner = 1.0 - std::exp(-2.0 * (hxy2 - joint_entropy));
        if (inner > 0.0) imc2 = std::sqrt(inner);
    }

    double idm = 0.0, idmn = 0.0, idf = 0.0, idn = 0.0, inv_var = 0.0;
    for (int k = 0; k < N; ++k) {
        idm += pdiff[k] / (1.0 + static_cast<double>(k) * k);
        idmn += pdiff[k] / (1.0 + static_cast<double>(k) * k / (N * static_cast<double>(N)));
        idf += pdiff[k] / (1.0 + k);
        idn += pdiff[k] / (1.0 + static_cast<double>(k) / N);
        if (k >= 1) inv_var += pdiff[k] / (static_cast<double>(k) * k);
    }

    // maximal correlation coefficient via the symmetric similarity
    // D^{-1/2} P D^{-1/2}: its eigenvalues squared are those of the
    // second-moment matrix Q, so MCC is the second-largest |eigenvalue|
    std::vector<int> support;
    for (int i = 0; i < N; ++i)
        if (px[i] > 0.0) support.push_back(i);
    double mcc = 1.0;
    if (support.size() > 1) {
        int m = static_cast<int>(support.size());
        std::vector<double> sym(static_cast<std::size_t>(m) * m, 0.0);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                sym[a * m + b] =
                    p[support[a] * N + support[b]] / std::sqrt(px[support[a]] * px[support[b]]);
        auto eig = jacobi_eigenvalues(std::move(sym), m);
        for (double& e : eig) e = std::abs(e);
        std::sort(eig.begin(), eig.end(), std::greater<double>());
        mcc = std::clamp(eig[1], 0.0, 1.0);
    }

    double sum_avg = 0.0, sum_entropy = 0.0;
    for (int k = 2; k <= 2 * N; ++k) {
        sum_avg += k * psum[k];
        if (psum[k] > 0.0) sum_entropy -= psum[k] * log2_safe(psum[k]);
    }

    return {autocorr, mu, prominence, shade, tendency, contrast, correlation,
            diff_avg, diff_entropy, diff_var, joint_energy, joint_entropy,
            imc1, imc2, idm, idmn, idf, idn, inv_var, mcc, maxprob,
            sum_avg, sum_entropy, var};
}

} // namespace

FeatureVector glcm_features(const DiscretizedROI& roi) {
    return glcm_features(roi, texture_directions13());
}

FeatureVector glcm_features(const DiscretizedROI& roi, const std::vector<Index3>& directions) {
    const auto& names = glcm_feature_names();
    const int nx = roi.grid.sizes[0], ny = roi.grid.sizes[1], nz = roi.grid.sizes[2];
    const int N = kGrayLevels;

    std::vector<std::vector<double>> per_direction(names.size());
    for (const Index3& d : directions) {
        double mat[kGrayLevels * kGrayLevels] = {0};
        double total = 0.0;
        for (int k = 0; k < nz; ++k) {
            int kk = k + d[2];
            if (kk < 0 || kk >= nz) continue;
            for (int j = 0; j < ny; ++j) {
                int jj = j + d[1];
                if (jj < 0 || jj >= ny) continue;
                for (int i = 0; i < nx; ++i) {
                    int ii = i + d[0];
                    if (ii < 0 || ii >= nx) continue;
                    int g1 = roi.at(i, j, k);
                    if (!g1) continue;
                    int g2 = roi.at(ii, jj, kk);
                    if (!g2) continue;
                    mat[(g1 - 1) * N + (g2 - 1)] += 1.0;
                    mat[(g2 - 1) * N + (g1 - 1)] += 1.0;
                    total += 2.0;
                }
            }
        }
        if (total == 0.0) continue;
        for (double& v : mat) v /= total;
        auto f = glcm_single_direction_features(mat);
        for (std::size_t i = 0; i < names.size(); ++i) per_direction[i].push_back(f[i]);
    }

    FeatureVector fv;
    if (per_direction[0].empty()) {
        for (const auto& n : names) fv.push_undefined(n);
        return fv;
    }
    for (std::size_t i = 0; i < names.size(); ++i)
        fv.push(names[i], mean_sorted(per_direction[i]));
    return fv;
}

// ---------------------------------------------------------------------------
// GLRLM

const std::vector<std::string>& glrlm_feature_names() {
    static const std::vector<std::string> names = {
        "short_run_emphasis", "long_run_emphasis", "gray_level_nonuniformity",
        "gray_level_nonuniformity_normalized", "run_length_nonuniformity",
        "run_length_nonuniformity_normalized", "run_percentage", "gray_level_variance",
        "run_variance", "run_entropy", "low_gray_level_run_emphasis",
        "high_gray_level_run_emphasis", "short_run_low_gray_level_emphasis",
        "short_run_high_gray_level_emphasis", "long_run_low_gray_level_emphasis",
        "long_run_high_gray_level_emphasis",
    };
    return names;
}

namespace {

std::vector<double> glrlm_single_direction_features(const std::vector<double>& runs, int max_len,
                                                    std::size_t n_voxels) {
    const int N = kGrayLevels;
    auto R = [&](int g, int l) -> double { return runs[static_cast<std::size_t>(g) * max_len + (l - 1)]; };

    double nr = 0.0;
    for (double v : runs) nr += v;

    double sre = 0, lre = 0, lgl = 0, hgl = 0, srlgl = 0, srhgl = 0, lrlgl = 0, lrhgl = 0;
    double gln = 0, rln = 0, mu_g = 0, mu_l = 0, entropy = 0;
    for (int g = 0; g < N; ++g) {
        double row = 0.0;
        for (int l = 1; l <= max_len; ++l) {
            double v = R(g, l);
            if (v == 0.0) continue;
            row += v;
            double gi = g + 1;
            sre += v / (static_cast<double>(l) * l);
            lre += v * l * l;
            lgl += v / (gi * gi);
            hgl += v * gi * gi;
            srlgl += v / (gi * gi * l * l);
            srhgl += v * gi * gi / (static_cast<double>(l) * l);
            lrlgl += v * l * l / (gi * gi);
            lrhgl += v * gi * gi * l * l;
            mu_g += v * gi;
            mu_l += v * l;
            double pr = v / nr;
            entropy -= pr * log2_safe(pr);
        }
        gln += row * row;
    }
    for (int l = 1; l <= max_len; ++l) {
        double col = 0.0;
        for (int g = 0; g < N; ++g) col += R(g, l);
        rln += col * col;
    }
    mu_g /= nr;
    mu_l /= nr;
    double var_g = 0.0, var_l = 0.0;
    for (int g = 0; g < N; ++g)
        for (int l = 1; l <= max_len; ++l) {
            double v = R(g, l);
            if (v == 0.0) continue;
            var_g += (g + 1 - mu_g) * (g + 1 - mu_g) * v / nr;
            var_l += (l - mu_l) * (l - mu_l) * v / nr;
        }

    return {sre / nr, lre / nr, gln / nr, gln / (nr * nr), rln / nr, rln / (nr * nr),
            nr / static_cast<double>(n_voxels), var_g, var_l, entropy,
            lgl / nr, hgl / nr, srlgl / nr, srhgl / nr, lrlgl / nr, lrhgl / nr};
}

} // namespace

FeatureVector glrlm_features(const DiscretizedROI& roi) {
    return glrlm_features(roi, texture_directions13());
}

FeatureVector glrlm_features(const DiscretizedROI& roi, const std::vector<Index3>& directions) {
    const auto& names = glrlm_feature_names();
    const int nx = roi.grid.sizes[0], ny = roi.grid.sizes[1], nz = roi.grid.sizes[2];
    const int max_len = std::max({nx, ny, nz});

    std::vector<std::vector<double>> per_direction(names.size());
    for (const Index3& d : directions) {
        std::vector<double> runs(static_cast<std::size_t>(kGrayLevels) * max_len, 0.0);
        auto in_bounds = [&](int i, int j, int k) {
            return i >= 0 && i < nx && j >= 0 && j < ny && k >= 0 && k < nz;
        };
        for (int k = 0; k < nz; ++k)
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) {
                    int g = roi.at(i, j, k);
                    if (!g) continue;
                    // run start: predecessor is out of mask or different level
                    int pi = i - d[0], pj = j - d[1], pk = k - d[2];
                    if (in_bounds(pi, pj, pk) && roi.at(pi, pj, pk) == g) continue;
                    int len = 1;
                    int ci = i + d[0], cj = j + d[1], ck = k + d[2];
                    while (in_bounds(ci, cj, ck) && roi.at(ci, cj, ck) == g) {
                        ++len;
                        ci += d[0];
                        cj += d[1];
                        ck += d[2];
                    }
                    runs[static_cast<std::size_t>(g - 1) * max_len + (len - 1)] += 1.0;
                }
        auto f = glrlm_single_direction_features(runs, max_len, roi.voxel_count);
        for (std::size_t i = 0; i < names.size(); ++i) per_direction[i].push_back(f[i]);
    }

    FeatureVector fv;
    for (std::size_t i = 0; i < names.size(); ++i)
        fv.push(names[i], mean_sorted(per_direction[i]));
    return fv;
}

// ---------------------------------------------------------------------------
// GLDM

const std::vector<std::string>& gldm_feature_names() {
    static const std::vector<std::string> names = {
        "small_dependence_emphasis", "large_dependence_emphasis", "gray_level_nonuniformity",
        "dependence_nonuniformity", "dependence_nonuniformity_normalized", "gray_level_variance",
        "dependence_variance", "dependence_entropy", "low_gray_level_emphasis",
        "high_gray_level_emphasis", "small_dependence_low_gray_level_emphasis",
        "small_dependence_high_gray_level_emphasis", "large_dependence_low_gray_level_emphasis",
        "large_dependence_high_gray_level_emphasis",
    };
    return names;
}

FeatureVector gldm_features(const DiscretizedROI& roi) {
    const auto& names = gldm_feature_names();
    const int nx = roi.grid.sizes[0], ny = roi.grid.sizes[1], nz = roi.grid.sizes[2];
    const int max_dep = 27; // 1 (the voxel itself) + up to 26 equal neighbors

    std::vector<double> mat(static_cast<std::size_t>(kGrayLevels) * max_dep, 0.0);
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                int g = roi.at(i, j, k);
                if (!g) continue;
                int dep = 1;
                for (int dk = -1; dk <= 1; ++dk)
                    for (int dj = -1; dj <= 1; ++dj)
                        for (int di = -1; di <= 1; ++di) {
                            if (!di && !dj && !dk) continue;
                            int ii = i + di, jj = j + dj, kk = k + dk;
                            if (ii < 0 || ii >= nx || jj < 0 || jj >= ny || kk < 0 || kk >= nz)
                                continue;
                            if (roi.at(ii, jj, kk) == g) ++dep;
                        }
                mat[static_cast<std::size_t>(g - 1) * max_dep + (dep - 1)] += 1.0;
            }

    double nz_total = 0.0;
    for (double v : mat) nz_total += v;

    double sde = 0, lde = 0, lgl = 0, hgl = 0, sdlgl = 0, sdhgl = 0, ldlgl = 0, ldhgl = 0;
    double gln = 0, dn = 0, mu_g = 0, mu_d = 0, entropy = 0;
    for (int g = 0; g < kGrayLevels; ++g) {
        double row = 0.0;
        for (int d = 1; d <= max_dep; ++d) {
            double v = mat[static_cast<std::size_t>(g) * max_dep + (d - 1)];
            if (v == 0.0) continue;
            row += v;
            double gi = g + 1;
            sde += v / (static_cast<double>(d) * d);
            lde += v * d * d;
            lgl += v / (gi * gi);
            hgl += v * gi * gi;
            sdlgl += v / (gi * gi * d * d);
            sdhgl += v * gi * gi / (static_cast<double>(d) * d);
            ldlgl += v * d * d / (gi * gi);
            ldhgl += v * gi * gi * d * d;
            mu_g += v * gi;
            mu_d += v * d;
            double pr = v / nz_total;
            entropy -= pr * log2_safe(pr);
        }
        gln += row * row;
    }
    for (int d = 1; d <= max_dep; ++d) {
        double col = 0.0;
        for (int g = 0; g < kGrayLevels; ++g) col += mat[static_cast<std::size_t>(g) * max_dep + (d - 1)];
        dn += col * col;
    }
    mu_g /= nz_total;
    mu_d /= nz_total;
    double var_g = 0.0, var_d = 0.0;
    for (int g = 0; g < kGrayLevels; ++g)
        for (int d = 1; d <= max_dep; ++d) {
            double v = mat[static_cast<std::size_t>(g) * max_dep + (d - 1)];
            if (v == 0.0) continue;
            var_g += (g + 1 - mu_g) * (g + 1 - mu_g) * v / nz_total;
            var_d += (d - mu_d) * (d - mu_d) * v / nz_total;
        }

    FeatureVector fv;
    fv.push(names[0], sde / nz_total);
    fv.push(names[1], lde / nz_total);
    fv.push(names[2], gln / nz_total);
    fv.push(names[3], dn / nz_total);
    fv.push(names[4], dn / (nz_total * nz_total));
    fv.push(names[5], var_g);
    fv.push(names[6], var_d);
    fv.push(names[7], entropy);
    fv.push(names[8], lgl / nz_total);
    fv.push(names[9], hgl / nz_total);
    fv.push(names[10], sdlgl / nz_total);
    fv.push(names[11], sdhgl / nz_total);
    fv.push(names[12], ldlgl / nz_total);
    fv.push(names[13], ldhgl / nz_total);
    return fv;
}

// ---------------------------------------------------------------------------
// NGTDM

const std::vector<std::string>& ngtdm_feature_names() {
    static const std::vector<std::string> names = {"coarseness", "contrast", "busyness",
                                                   "complexity", "strength"};
    return names;
}

FeatureVector ngtdm_features(const DiscretizedROI& roi) {
    const auto& names = ngtdm_feature_names();
    const int nx = roi.grid.sizes[0], ny = roi.grid.sizes[1], nz = roi.grid.sizes[2];

    double n_i[kGrayLevels] = {0};
    double s_i[kGrayLevels] = {0};
    double n_total = 0.0;
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                int g = roi.at(i, j, k);
                if (!g) continue;
                double sum = 0.0;
                int cnt = 0;
                for (int dk = -1; dk <= 1; ++dk)
                    for (int dj = -1; dj <= 1; ++dj)
                        for (int di = -1; di <= 1; ++di) {
                            if (!di && !dj && !dk) continue;
                            int ii = i + di, jj = j + dj, kk = k + dk;
                            if (ii < 0 || ii >= nx || jj < 0 || jj >= ny || kk < 0 || kk >= nz)
                                continue;
                            int gn = roi.at(ii, jj, kk);
                            if (!gn) continue;
                            sum += gn;
                            ++cnt;
                        }
                if (cnt == 0) continue; // isolated voxels are excluded
                n_i[g - 1] += 1.0;
                s_i[g - 1] += std::abs(static_cast<double>(g) - sum / cnt);
                n_total += 1.0;
            }

    FeatureVector fv;
    if (n_total == 0.0) {
        fv.push(names[0], 1e6);
        fv.push(names[1], 0.0);
        fv.push(names[2], 0.0);
        fv.push(names[3], 0.0);
        fv.push(names[4], 0.0);
        return fv;
    }

    double p_i[kGrayLevels];
    int n_gp = 0;
    double s_total = 0.0;
    for (int g = 0; g < kGrayLevels; ++g) {
        p_i[g] = n_i[g] / n_total;
        if (n_i[g] > 0.0) ++n_gp;
        s_total += s_i[g];
    }

    double ps = 0.0;
    for (int g = 0; g < kGrayLevels; ++g) ps += p_i[g] * s_i[g];
    double coarseness = ps > 0.0 ? 1.0 / ps : 1e6;

    double contrast = 0.0;
    if (n_gp > 1) {
        double acc = 0.0;
        for (int a = 0; a < kGrayLevels; ++a)
            for (int b = 0; b < kGrayLevels; ++b)
                if (p_i[a] > 0.0 && p_i[b] > 0.0)
                    acc += p_i[a] * p_i[b] * (a - b) * (a - b);
        contrast = acc / (static_cast<double>(n_gp) * (n_gp - 1)) * (s_total / n_total);
    }

    double busy_den = 0.0, complexity = 0.0, strength_num = 0.0;
    for (int a = 0; a < kGrayLevels; ++a) {
        if (p_i[a] <= 0.0) continue;
        for (int b = 0; b < kGrayLevels; ++b) {
            if (p_i[b] <= 0.0) continue;
            double ga = a + 1, gb = b + 1;
            busy_den += std::abs(ga * p_i[a] - gb * p_i[b]);
            complexity += std::abs(ga - gb) * (p_i[a] * s_i[a] + p_i[b] * s_i[b]) / (p_i[a] + p_i[b]);
            strength_num += (p_i[a] + p_i[b]) * (ga - gb) * (ga - gb);
        }
    }
    double busyness = busy_den > 0.0 ? ps / busy_den : 0.0;
    complexity /= n_total;
    double strength = s_total > 0.0 ? strength_num / s_total : 0.0;

    fv.push(names[0], coarseness);
    fv.push(names[1], contrast);
    fv.push(names[2], busyness);
    fv.push(names[3], complexity);
    fv.push(names[4], strength);
    return fv;
}

// ---------------------------------------------------------------------------
// first order

const std::vector<std::string>& first_order_feature_names() {
    static const std::vector<std::string> names = {
        "energy", "total_energy", "entropy", "minimum", "percentile10", "percentile90",
        "maximum", "mean", "median", "interquartile_range", "range",
        "mean_absolute_deviation", "robust_mean_absolute_deviation", "root_mean_squared",
        "skewness", "kurtosis", "variance", "uniformity",
    };
    return names;
}

FeatureVector first_order_features(const std::vector<double>& values, double voxel_volume_mm3) {
    if (values.empty()) throw std::runtime_error("first_order_features: no values");
    const auto& names = first_order_feature_names();
    const double n = static_cast<double>(values.size());

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    double vmin = sorted.front(), vmax = sorted.back();

    auto pct = [&](double p) {
        if (sorted.size() == 1) return sorted[0];
        double rank = (n - 1.0) * p / 100.0;
        std::size_t lo = static_cast<std::size_t>(std::floor(rank));
        std::size_t hi = std::min(lo + 1, sorted.size() - 1);
        double t = rank - static_cast<double>(lo);
        return sorted[lo] + t * (sorted[hi] - sorted[lo]);
    };
    double p10 = pct(10.0), p90 = pct(90.0);

    double energy = 0.0;
    for (double v : values) energy += v * v;

    Moments m = central_moments(values);

    double mad = 0.0;
    for (double v : values) mad += std::abs(v - m.mean);
    mad /= n;

    double rmad = 0.0;
    {
        double sub_sum = 0.0;
        std::size_t sub_n = 0;
        for (double v : sorted)
            if (v >= p10 && v <= p90) {
                sub_sum += v;
                ++sub_n;
            }
        if (sub_n > 0) {
            double sub_mean = sub_sum / static_cast<double>(sub_n);
            for (double v : sorted)
                if (v >= p10 && v <= p90) rmad += std::abs(v - sub_mean);
            rmad /= static_cast<double>(sub_n);
        }
    }

    double hist[kGrayLevels] = {0};
    for (double v : values) hist[discretize16_level(v, vmin, vmax) - 1] += 1.0;
    double entropy = 0.0, uniformity = 0.0;
    for (double h : hist) {
        double p = h / n;
        uniformity += p * p;
        if (p > 0.0) entropy -= p * log2_safe(p);
    }

    FeatureVector fv;
    fv.push(names[0], energy);
    fv.push(names[1], energy * voxel_volume_mm3);
    fv.push(names[2], entropy);
    fv.push(names[3], vmin);
    fv.push(names[4], p10);
    fv.push(names[5], p90);
    fv.push(names[6], vmax);
    fv.push(names[7], m.mean);
    fv.push(names[8], pct(50.0));
    fv.push(names[9], pct(75.0) - pct(25.0));
    fv.push(names[10], vmax - vmin);
    fv.push(names[11], mad);
    fv.push(names[12], rmad);
    fv.push(names[13], std::sqrt(energy / n));
    if (values.size() < 2 || m.m2 <= 0.0) {
        fv.push_undefined(names[14]);
        fv.push_undefined(names[15]);
    } else {
        fv.push(names[14], m.m3 / std::pow(m.m2, 1.5));
        fv.push(names[15], m.m4 / (m.m2 * m.m2));
    }
    fv.push(names[16], m.m2);
    fv.push(names[17], uniformity);
    return fv;
}

// ---------------------------------------------------------------------------
// shape

const std::vector<std::string>& shape_feature_names() {
    static const std::vector<std::string> names = {
        "voxel_volume_mm3", "surface_area_mm2", "surface_volume_ratio", "sphericity",
        "max_3d_diameter_mm", "max_2d_diameter_slice_mm", "max_2d_diameter_column_mm",
        "max_2d_diameter_row_mm", "major_axis_length_mm", "minor_axis_length_mm",
        "least_axis_length_mm", "elongation", "flatness", "mesh_volume_mm3",
    };
    return names;
}

FeatureVector shape_features(const LabelMask& mask) {
    mask.validate();
    const auto& names = shape_feature_names();
    const GridSpec& g = mask.grid;
    const int nx = g.sizes[0], ny = g.sizes[1], nz = g.sizes[2];
    const double sx = g.spacing[0], sy = g.spacing[1], sz = g.spacing[2];

    auto inside = [&](int i, int j, int k) {
        return i >= 0 && i < nx && j >= 0 && j < ny && k >= 0 && k < nz && mask.at(i, j, k) != 0;
    };

    std::vector<Index3> voxels;
    double surface = 0.0;
    std::vector<Index3> boundary; // candidates for diameter search
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                if (!mask.at(i, j, k)) continue;
                voxels.push_back({i, j, k});
                int exposed = 0;
                if (!inside(i - 1, j, k)) { surface += sy * sz; ++exposed; }
                if (!inside(i + 1, j, k)) { surface += sy * sz; ++exposed; }
                if (!inside(i, j - 1, k)) { surface += sx * sz; ++exposed; }
                if (!inside(i, j + 1, k)) { surface += sx * sz; ++exposed; }
                if (!inside(i, j, k - 1)) { surface += sx * sy; ++exposed; }
                if (!inside(i, j, k + 1)) { surface += sx * sy; ++exposed; }
                if (exposed > 0) boundary.push_back({i, j, k});
            }
    if (voxels.empty()) throw std::runtime_error("shape_features: empty mask");

    const double n = static_cast<double>(voxels.size());
    double volume = n * g.voxel_volume_mm3();
    double sphericity = std::cbrt(36.0 * std::numbers::pi * volume * volume) / surface;

    double max3d = 0.0, max2d_slice = 0.0, max2d_col = 0.0, max2d_row = 0.0;
    for (std::size_t a = 0; a < boundary.size(); ++a) {
        for (std::size_t b = a + 1; b < boundary.size(); ++b) {
            double dx = (boundary[a][0] - boundary[b][0]) * sx;
            double dy = (boundary[a][1] - boundary[b][1]) * sy;
            double dz = (boundary[a][2] - boundary[b][2]) * sz;
            double d2 = dx * dx + dy * dy + dz * dz;
            max3d = std::max(max3d, d2);
            if (boundary[a][2] == boundary[b][2]) max2d_slice = std::max(max2d_slice, dx * dx + dy * dy);
            if (boundary[a][1] == boundary[b][1]) max2d_col = std::max(max2d_col, dx * dx + dz * dz);
            if (boundary[a][0] == boundary[b][0]) max2d_row = std::max(max2d_row, dy * dy + dz * dz);
        }
    }
    max3d = std::sqrt(max3d);
    max2d_slice = std::sqrt(max2d_slice);
    max2d_col = std::sqrt(max2d_col);
    max2d_row = std::sqrt(max2d_row);

    // PCA of physical voxel centers
    double mean[3] = {0, 0, 0};
    for (const auto& v : voxels) {
        mean[0] += v[0] * sx;
        mean[1] += v[1] * sy;
        mean[2] += v[2] * sz;
    }
    for (double& c : mean) c /= n;
    double cov[9] = {0};
    for (const auto& v : voxels) {
        double d[3] = {v[0] * sx - mean[0], v[1] * sy - mean[1], v[2] * sz - mean[2]};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) cov[a * 3 + b] += d[a] * d[b];
    }
    for (double& c : cov) c /= n;
    auto eig = jacobi_eigenvalues(std::vector<double>(cov, cov + 9), 3);
    for (double& e : eig) e = std::max(e, 0.0);
    std::sort(eig.begin(), eig.end(), std::greater<double>());

    FeatureVector fv;
    fv.push(names[0], volume);
    fv.push(names[1], surface);
    fv.push(names[2], surface / volume);
    fv.push(names[3], sphericity);
    fv.push(names[4], max3d);
    fv.push(names[5], max2d_slice);
    fv.push(names[6], max2d_col);
    fv.push(names[7], max2d_row);
    if (voxels.size() < 3 || eig[0] <= 0.0) {
        for (int i = 8; i <= 12; ++i) fv.push_undefined(names[i]);
    } else {
        fv.push(names[8], 4.0 * std::sqrt(eig[0]));
        fv.push(names[9], 4.0 * std::sqrt(eig[1]));
        fv.push(names[10], 4.0 * std::sqrt(eig[2]));
        fv.push(names[11], std::sqrt(eig[1] / eig[0]));
        fv.push(names[12], std::sqrt(eig[2] / eig[0]));
    }
    fv.push(names[13], volume);
    return fv;
}

// ---------------------------------------------------------------------------
// wavelet

const Volume& WaveletBank::by_label(const std::string& label) const {
    for (std::size_t i = 0; i < kLabels.size(); ++i)
        if (label == kLabels[i]) return subbands[i];
    throw std::runtime_error("wavelet: unknown subband " + label);
}

const std::vector<std::string>& wavelet_subband_order() {
    static const std::vector<std::string> order = {"LLL", "LLH", "LHL", "LHH",
                                                   "HLL", "HLH", "HHL", "HHH"};
    return order;
}

namespace {

// One stationary Haar pass along `axis`; out_low/out_high may not alias in.
void haar_pass(const Volume& in, Volume& out_low, Volume& out_high, int axis, WaveletPad pad) {
    const int nx = in.grid.sizes[0], ny = in.grid.sizes[1], nz = in.grid.sizes[2];
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    const int n_axis = in.grid.sizes[axis];
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                int c[3] = {i, j, k};
                int next = c[axis] + 1;
                if (next >= n_axis) next = (pad == WaveletPad::Wrap) ? 0 : n_axis - 1;
                int cn[3] = {i, j, k};
                cn[axis] = next;
                double a = in.at(c[0], c[1], c[2]);
                double b = in.at(cn[0], cn[1], cn[2]);
                std::size_t idx = in.index(i, j, k);
                out_low.values[idx] = (a + b) * inv_sqrt2;
                out_high.values[idx] = (a - b) * inv_sqrt2;
            }
}

} // namespace

WaveletBank wavelet8(const Volume& vol, WaveletPad pad) {
    vol.validate();
    for (int a = 0; a < 3; ++a)
        if (vol.grid.sizes[a] < 2) throw std::runtime_error("wavelet8: sizes must be >= 2 per axis");

    auto blank = [&]() {
        Volume v;
        v.grid = vol.grid;
        v.values.assign(vol.values.size(), 0.0);
        return v;
    };

    // x pass
    Volume lx = blank(), hx = blank();
    haar_pass(vol, lx, hx, 0, pad);
    // y pass
    Volume ll = blank(), lh = blank(), hl = blank(), hh = blank();
    haar_pass(lx, ll, lh, 1, pad);
    haar_pass(hx, hl, hh, 1, pad);

    WaveletBank bank;
    for (auto& s : bank.subbands) s = blank();
    // z pass; subband index: bit0 = x high, bit1 = y high, bit2 = z high
    haar_pass(ll, bank.subbands[0], bank.subbands[4], 2, pad); // LLL, LLH
    haar_pass(hl, bank.subbands[1], bank.subbands[5], 2, pad); // HLL, HLH
    haar_pass(lh, bank.subbands[2], bank.subbands[6], 2, pad); // LHL, LHH
    haar_pass(hh, bank.subbands[3], bank.subbands[7], 2, pad); // HHL, HHH
    return bank;
}

// ---------------------------------------------------------------------------
// full vector

namespace {

struct Crop {
    GridSpec grid;
    int off[3];
};

Crop crop_around_mask(const LabelMask& mask, int margin) {
    int lo[3] = {mask.grid.sizes[0], mask.grid.sizes[1], mask.grid.sizes[2]};
    int hi[3] = {-1, -1, -1};
    for (int k = 0; k < mask.grid.sizes[2]; ++k)
        for (int j = 0; j < mask.grid.sizes[1]; ++j)
            for (int i = 0; i < mask.grid.sizes[0]; ++i) {
                if (!mask.at(i, j, k)) continue;
                lo[0] = std::min(lo[0], i); hi[0] = std::max(hi[0], i);
                lo[1] = std::min(lo[1], j); hi[1] = std::max(hi[1], j);
                lo[2] = std::min(lo[2], k); hi[2] = std::max(hi[2], k);
            }
    if (hi[0] < 0) throw std::runtime_error("radiomics: empty mask");
    Crop c;
    for (int a = 0; a < 3; ++a) {
        int l = std::max(0, lo[a] - margin);
        int h = std::min(mask.grid.sizes[a] - 1, hi[a] + margin);
        c.off[a] = l;
        c.grid.sizes[a] = h - l + 1;
        c.grid.spacing[a] = mask.grid.spacing[a];
        c.grid.origin[a] = mask.grid.origin[a] + l * mask.grid.spacing[a];
    }
    return c;
}

void append(FeatureVector& out, const FeatureVector& part, const std::string& prefix) {
    for (const auto& e : part.entries) {
        if (e.defined) out.push(prefix + e.name, e.value);
        else out.push_undefined(prefix + e.name);
    }
}

} // namespace

const std::vector<std::string>& radiomics_feature_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& n : shape_feature_names()) v.push_back("shape_" + n);
        for (const auto& n : first_order_feature_names()) v.push_back("original_firstorder_" + n);
        for (const auto& n : glcm_feature_names()) v.push_back("original_glcm_" + n);
        for (const auto& n : glrlm_feature_names()) v.push_back("original_glrlm_" + n);
        for (const auto& sub : wavelet_subband_order()) {
            for (const auto& n : first_order_feature_names())
                v.push_back("wavelet_" + sub + "_firstorder_" + n);
            for (const auto& n : glcm_feature_names()) v.push_back("wavelet_" + sub + "_glcm_" + n);
            for (const auto& n : glrlm_feature_names()) v.push_back("wavelet_" + sub + "_glrlm_" + n);
        }
        return v;
    }();
    return names;
}

FeatureVector radiomics_vector(const PCATRegion& region, const Volume& vol) {
    if (region.values.empty()) throw std::runtime_error("radiomics_vector: empty region");
    if (!region.mask.grid.congruent(vol.grid))
        throw std::runtime_error("radiomics_vector: region/volume grids differ");

    // working crop; margin 4 > median-filter reach (1) + Haar reach (1),
    // so filtered and subband values at mask voxels are identical to a
    // full-volume computation
    Crop crop = crop_around_mask(region.mask, 4);
    const GridSpec& cg = crop.grid;
    LabelMask cmask;
    cmask.grid = cg;
    cmask.labels.assign(cg.voxel_count(), 0);
    Volume craw;
    craw.grid = cg;
    craw.values.assign(cg.voxel_count(), 0.0);
    std::size_t idx = 0;
    for (int k = 0; k < cg.sizes[2]; ++k)
        for (int j = 0; j < cg.sizes[1]; ++j)
            for (int i = 0; i < cg.sizes[0]; ++i, ++idx) {
                cmask.labels[idx] = region.mask.at(i + crop.off[0], j + crop.off[1], k + crop.off[2]);
                craw.values[idx] = vol.at(i + crop.off[0], j + crop.off[1], k + crop.off[2]);
            }
    Volume cvol = median_filter_axial(craw);

    const double voxvol = cg.voxel_volume_mm3();

    FeatureVector out;
    out.artery = region.artery;
    append(out, shape_features(cmask), "shape_");
    append(out, first_order_features(region.values, voxvol), "original_firstorder_");
    DiscretizedROI droi = discretize16(cmask, cvol);
    append(out, glcm_features(droi), "original_glcm_");
    append(out, glrlm_features(droi), "original_glrlm_");

    WaveletBank bank = wavelet8(cvol);
    for (const auto& sub : wavelet_subband_order()) {
        const Volume& sv = bank.by_label(sub);
        std::vector<double> svals;
        svals.reserve(region.values.size());
        for (std::size_t i = 0; i < cmask.labels.size(); ++i)
            if (cmask.labels[i]) svals.push_back(sv.values[i]);
        std::string prefix = "wavelet_" + sub + "_";
        append(out, first_order_features(svals, voxvol), prefix + "firstorder_");
        DiscretizedROI sroi = discretize16(cmask, sv);
        append(out, glcm_features(sroi), prefix + "glcm_");
        append(out, glrlm_features(sroi), prefix + "glrlm_");
    }

    if (out.entries.size() != 536) throw std::runtime_error("radiomics_vector: dictionary size mismatch");
    return out;
}

FeatureVector extended_texture_vector(const PCATRegion& region) {
    DiscretizedROI droi = discretize16(region);
    FeatureVector out;
    out.artery = region.artery;
    append(out, gldm_features(droi), "original_gldm_");
    append(out, ngtdm_features(droi), "original_ngtdm_");
    return out;
}

} // namespace pcat
