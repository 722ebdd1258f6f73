#include "pcat/volume.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace pcat {

bool GridSpec::congruent(const GridSpec& o, double tol) const {
    if (sizes != o.sizes) return false;
    for (int a = 0; a < 3; ++a) {
        if (std::abs(spacing[a] - o.spacing[a]) > tol) return false;
        if (std::abs(origin[a] - o.origin[a]) > tol) return false;
    }
    return true;
}

void GridSpec::validate() const {
    for (int a = 0; a < 3; ++a) {
        if (sizes[a] <= 0) throw std::runtime_error("grid: non-positive size on axis " + std::to_string(a));
        if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a]))
            throw std::runtime_error("grid: non-positive spacing on axis " + std::to_string(a));
        if (!std::isfinite(origin[a])) throw std::runtime_error("grid: non-finite origin");
    }
}

void Volume::validate() const {
    grid.validate();
    if (values.size() != grid.voxel_count())
        throw std::runtime_error("volume: value count does not match sizes");
    for (double v : values)
        if (!std::isfinite(v)) throw std::runtime_error("volume: non-finite value");
}

void LabelMask::validate() const {
    grid.validate();
    if (labels.size() != grid.voxel_count())
        throw std::runtime_error("mask: label count does not match sizes");
}

double Volume::sample(const Vec3& p) const {
    Vec3 c = grid.to_voxel(p);
    double fx = std::clamp(c[0], 0.0, static_cast<double>(grid.sizes[0] - 1));
    double fy = std::clamp(c[1], 0.0, static_cast<double>(grid.sizes[1] - 1));
    double fz = std::clamp(c[2], 0.0, static_cast<double>(grid.sizes[2] - 1));
    int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy), z0 = static_cast<int>(fz);
    int x1 = std::min(x0 + 1, grid.sizes[0] - 1);
    int y1 = std::min(y0 + 1, grid.sizes[1] - 1);
    int z1 = std::min(z0 + 1, grid.sizes[2] - 1);
    double tx = fx - x0, ty = fy - y0, tz = fz - z0;

    double c000 = at(x0, y0, z0), c100 = at(x1, y0, z0);
    double c010 = at(x0, y1, z0), c110 = at(x1, y1, z0);
    double c001 = at(x0, y0, z1), c101 = at(x1, y0, z1);
    double c011 = at(x0, y1, z1), c111 = at(x1, y1, z1);

    double c00 = c000 + tx * (c100 - c000);
    double c10 = c010 + tx * (c110 - c010);
    double c01 = c001 + tx * (c101 - c001);
    double c11 = c011 + tx * (c111 - c011);
    double c0 = c00 + ty * (c10 - c00);
    double c1 = c01 + ty * (c11 - c01);
    return c0 + tz * (c1 - c0);
}

const char* artery_name(std::uint8_t label) {
    switch (label) {
        case kLabelLAD: return "LAD";
        case kLabelLCX: return "LCX";
        case kLabelRCA: return "RCA";
        default: return "other";
    }
}

std::uint8_t artery_label(const std::string& name) {
    if (name == "LAD") return kLabelLAD;
    if (name == "LCX") return kLabelLCX;
    if (name == "RCA") return kLabelRCA;
    throw std::runtime_error("unknown artery name: " + name);
}

// ---------------------------------------------------------------------------
// NRRD subset I/O

namespace {

struct NrrdHeader {
    std::string type;
    int dimension = 0;
    std::vector<int> sizes;
    std::vector<Vec3> directions; // one per non-component axis
    bool has_component_axis = false;
    Vec3 origin{0, 0, 0};
    std::string endian;
    std::string encoding;
};

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    auto e = s.find_last_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

Vec3 parse_vector3(const std::string& tok, const char* field) {
    Vec3 v{};
    std::string s = trim(tok);
    if (s.size() < 2 || s.front() != '(' || s.back() != ')')
        throw std::runtime_error(std::string("nrrd: malformed vector in '") + field + "'");
    s = s.substr(1, s.size() - 2);
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream is(s);
    if (!(is >> v[0] >> v[1] >> v[2]))
        throw std::runtime_error(std::string("nrrd: malformed vector in '") + field + "'");
    return v;
}

// splits "(a,b,c) (d,e,f) ..." into parenthesized tokens; "none" allowed
std::vector<std::string> split_direction_tokens(const std::string& s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        if (std::isspace(static_cast<unsigned char>(s[i]))) { ++i; continue; }
        if (s[i] == '(') {
            auto j = s.find(')', i);
            if (j == std::string::npos) throw std::runtime_error("nrrd: malformed 'space directions'");
            out.push_back(s.substr(i, j - i + 1));
            i = j + 1;
        } else {
            auto j = i;
            while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
            out.push_back(s.substr(i, j - i));
            i = j;
        }
    }
    return out;
}

NrrdHeader parse_header(std::istream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("nrrd: empty file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "NRRD0004") throw std::runtime_error("nrrd: bad magic (expected NRRD0004): " + path);

    NrrdHeader h;
    std::map<std::string, std::string> seen;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) break; // blank line ends the header
        if (line[0] == '#') continue;
        auto colon = line.find(':');
        if (colon == std::string::npos) throw std::runtime_error("nrrd: malformed header line: " + line);
        std::string key = trim(line.substr(0, colon));
        std::string val = trim(line.substr(colon + 1));
        if (seen.count(key)) throw std::runtime_error("nrrd: duplicate field '" + key + "'");
        seen[key] = val;
    }

    auto require = [&](const char* key) -> const std::string& {
        auto it = seen.find(key);
        if (it == seen.end()) throw std::runtime_error(std::string("nrrd: missing field '") + key + "'");
        return it->second;
    };

    h.type = require("type");
    h.dimension = std::stoi(require("dimension"));
    {
        std::istringstream is(require("sizes"));
        int v;
        while (is >> v) h.sizes.push_back(v);
    }
    {
        auto toks = split_direction_tokens(require("space directions"));
        for (const auto& t : toks) {
            if (t == "none") {
                h.has_component_axis = true;
                continue;
            }
            h.directions.push_back(parse_vector3(t, "space directions"));
        }
    }
    h.origin = parse_vector3(require("space origin"), "space origin");
    h.endian = require("endian");
    h.encoding = require("encoding");

    if (h.endian != "little") throw std::runtime_error("nrrd: unsupported 'endian' (want little)");
    if (h.encoding != "raw") throw std::runtime_error("nrrd: unsupported 'encoding' (want raw)");
    return h;
}

GridSpec grid_from_header(const NrrdHeader& h, int first_spatial_axis) {
    if (h.directions.size() != 3) throw std::runtime_error("nrrd: 'space directions' must have 3 spatial vectors");
    GridSpec g;
    for (int a = 0; a < 3; ++a) {
        g.sizes[a] = h.sizes[first_spatial_axis + a];
        const Vec3& d = h.directions[a];
        for (int b = 0; b < 3; ++b) {
            if (a == b) continue;
            if (d[b] != 0.0) throw std::runtime_error("nrrd: non-diagonal 'space directions'");
        }
        if (!(d[a] > 0.0)) throw std::runtime_error("nrrd: non-positive 'space directions'");
        g.spacing[a] = d[a];
    }
    g.origin = h.origin;
    g.validate();
    return g;
}

std::vector<std::uint8_t> read_payload(std::istream& in, std::size_t bytes, const std::string& path) {
    std::vector<std::uint8_t> buf(bytes);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(bytes));
    if (static_cast<std::size_t>(in.gcount()) != bytes)
        throw std::runtime_error("nrrd: payload size mismatch in " + path);
    char extra;
    if (in.read(&extra, 1)) throw std::runtime_error("nrrd: payload size mismatch in " + path);
    return buf;
}

double decode_short_le(const std::uint8_t* p) {
    std::uint16_t u = static_cast<std::uint16_t>(p[0] | (p[1] << 8));
    return static_cast<double>(static_cast<std::int16_t>(u));
}

double decode_float_le(const std::uint8_t* p) {
    std::uint32_t u = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                      (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
    return static_cast<double>(std::bit_cast<float>(u));
}

void encode_short_le(double v, std::uint8_t* p) {
    double r = std::nearbyint(v);
    if (r < -32768.0 || r > 32767.0) throw std::runtime_error("nrrd: value out of short range");
    std::uint16_t u = static_cast<std::uint16_t>(static_cast<std::int16_t>(r));
    p[0] = static_cast<std::uint8_t>(u & 0xff);
    p[1] = static_cast<std::uint8_t>(u >> 8);
}

void encode_float_le(double v, std::uint8_t* p) {
    std::uint32_t u = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    p[0] = static_cast<std::uint8_t>(u & 0xff);
    p[1] = static_cast<std::uint8_t>((u >> 8) & 0xff);
    p[2] = static_cast<std::uint8_t>((u >> 16) & 0xff);
    p[3] = static_cast<std::uint8_t>((u >> 24) & 0xff);
}

void write_header(std::ostream& out, const char* type, const GridSpec& g) {
    out << "NRRD0004\n";
    out << "type: " << type << "\n";
    out << "dimension: 3\n";
    out << "sizes: " << g.sizes[0] << " " << g.sizes[1] << " " << g.sizes[2] << "\n";
    char buf[256];
    std::snprintf(buf, sizeof(buf), "space directions: (%.17g,0,0) (0,%.17g,0) (0,0,%.17g)\n",
                  g.spacing[0], g.spacing[1], g.spacing[2]);
    out << buf;
    std::snprintf(buf, sizeof(buf), "space origin: (%.17g,%.17g,%.17g)\n", g.origin[0], g.origin[1],
                  g.origin[2]);
    out << buf;
    out << "endian: little\n";
    out << "encoding: raw\n";
    out << "\n";
}

} // namespace

Volume read_volume(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("nrrd: cannot open " + path);
    NrrdHeader h = parse_header(in, path);
    if (h.dimension != 3) throw std::runtime_error("nrrd: 'dimension' must be 3 for volumes");
    if (h.sizes.size() != 3) throw std::runtime_error("nrrd: 'sizes' must have 3 entries");
    if (h.type != "short" && h.type != "float")
        throw std::runtime_error("nrrd: unsupported 'type' for volume (want short|float)");

    Volume vol;
    vol.grid = grid_from_header(h, 0);
    std::size_t n = vol.grid.voxel_count();
    std::size_t elem = (h.type == "short") ? 2 : 4;
    auto buf = read_payload(in, n * elem, path);
    vol.values.resize(n);
    if (h.type == "short") {
        for (std::size_t i = 0; i < n; ++i) vol.values[i] = decode_short_le(&buf[i * 2]);
    } else {
        for (std::size_t i = 0; i < n; ++i) vol.values[i] = decode_float_le(&buf[i * 4]);
    }
    vol.validate();
    return vol;
}

void write_volume(const Volume& vol, const std::string& path, NrrdType type) {
    vol.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("nrrd: cannot write " + path);
    write_header(out, type == NrrdType::Short ? "short" : "float", vol.grid);
    std::size_t n = vol.values.size();
    std::size_t elem = type == NrrdType::Short ? 2 : 4;
    std::vector<std::uint8_t> buf(n * elem);
    if (type == NrrdType::Short) {
        for (std::size_t i = 0; i < n; ++i) encode_short_le(vol.values[i], &buf[i * 2]);
    } else {
        for (std::size_t i = 0; i < n; ++i) encode_float_le(vol.values[i], &buf[i * 4]);
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("nrrd: write failed for " + path);
}

LabelMask read_mask(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("nrrd: cannot open " + path);
    NrrdHeader h = parse_header(in, path);
    if (h.dimension != 3) throw std::runtime_error("nrrd: 'dimension' must be 3 for masks");
    if (h.type != "uchar") throw std::runtime_error("nrrd: mask 'type' must be uchar");

    LabelMask m;
    m.grid = grid_from_header(h, 0);
    std::size_t n = m.grid.voxel_count();
    m.labels = read_payload(in, n, path);
    m.validate();
    return m;
}

void write_mask(const LabelMask& mask, const std::string& path) {
    mask.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("nrrd: cannot write " + path);
    write_header(out, "uchar", mask.grid);
    out.write(reinterpret_cast<const char*>(mask.labels.data()),
              static_cast<std::streamsize>(mask.labels.size()));
    if (!out) throw std::runtime_error("nrrd: write failed for " + path);
}

// ---------------------------------------------------------------------------

Volume resample_to_grid(const Volume& vol, const GridSpec& target) {
    vol.validate();
    target.validate();
    Volume out;
    out.grid = target;
    out.values.resize(target.voxel_count());
    std::size_t idx = 0;
    for (int k = 0; k < target.sizes[2]; ++k)
        for (int j = 0; j < target.sizes[1]; ++j)
            for (int i = 0; i < target.sizes[0]; ++i)
                out.values[idx++] = vol.sample(target.position(i, j, k));
    return out;
}

LabelMask resample_mask_nn(const LabelMask& mask, const GridSpec& target) {
    mask.validate();
    target.validate();
    LabelMask out;
    out.grid = target;
    out.labels.resize(target.voxel_count());
    std::size_t idx = 0;
    for (int k = 0; k < target.sizes[2]; ++k)
        for (int j = 0; j < target.sizes[1]; ++j)
            for (int i = 0; i < target.sizes[0]; ++i) {
                Vec3 c = mask.grid.to_voxel(target.position(i, j, k));
                int x = std::clamp(static_cast<int>(std::lround(c[0])), 0, mask.grid.sizes[0] - 1);
                int y = std::clamp(static_cast<int>(std::lround(c[1])), 0, mask.grid.sizes[1] - 1);
                int z = std::clamp(static_cast<int>(std::lround(c[2])), 0, mask.grid.sizes[2] - 1);
                out.labels[idx++] = mask.at(x, y, z);
            }
    return out;
}

Volume window_hu(const Volume& vol, double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("window_hu: lo must be < hi");
    Volume out = vol;
    for (double& v : out.values) v = std::clamp(v, lo, hi);
    return out;
}

Volume median_filter_axial(const Volume& vol) {
    vol.validate();
    const int nx = vol.grid.sizes[0], ny = vol.grid.sizes[1], nz = vol.grid.sizes[2];
    Volume out = vol;
    double window[9];
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                int w = 0;
                for (int dj = -1; dj <= 1; ++dj) {
                    int jj = std::clamp(j + dj, 0, ny - 1);
                    for (int di = -1; di <= 1; ++di) {
                        int ii = std::clamp(i + di, 0, nx - 1);
                        window[w++] = vol.at(ii, jj, k);
                    }
                }
                std::nth_element(window, window + 4, window + 9);
                out.at(i, j, k) = window[4];
            }
        }
    }
    return out;
}

} // namespace pcat
