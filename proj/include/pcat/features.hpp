// Named, ordered feature table shared by the hand-crafted and radiomic
// feature engines. Undefined entries stay in the vector, flagged, so the
// column layout never changes.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcat {

struct FeatureValue {
    std::string name;
    double value = 0.0;
    bool defined = true;
};

struct FeatureVector {
    std::vector<FeatureValue> entries;
    std::uint8_t artery = 0;
    std::string modality; // "CTCS" or "CCTA"

    std::size_t size() const { return entries.size(); }
    const FeatureValue& operator[](std::size_t i) const { return entries[i]; }
    const FeatureValue& by_name(const std::string& name) const {
        for (const auto& e : entries)
            if (e.name == name) return e;
        throw std::runtime_error("feature not found: " + name);
    }
    void push(std::string name, double value) { entries.push_back({std::move(name), value, true}); }
    void push_undefined(std::string name) { entries.push_back({std::move(name), 0.0, false}); }
};

} // namespace pcat
