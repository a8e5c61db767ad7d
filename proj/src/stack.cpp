#include "smr/stack.hpp"

#include <cmath>
#include <stdexcept>

namespace smr {

namespace {

void check_material_into(const Material& m, const std::string& where,
                         std::vector<StackViolation>& out) {
    try {
        check_material(m);
    } catch (const std::invalid_argument& e) {
        out.push_back({where, e.what(), false});
    }
}

} // namespace

std::vector<StackViolation> validate_stack(const Stack& s) {
    std::vector<StackViolation> out;

    if (s.layers.empty())
        out.push_back({"stack", "no layers", false});
    if (s.piezo_index >= s.layers.size()) {
        out.push_back({"stack", "piezo index out of range", false});
        return out; // nothing else is meaningful
    }
    if (!(s.area > 0.0) || !std::isfinite(s.area))
        out.push_back({"geometry", "area must be > 0", false});

    for (std::size_t i = 0; i < s.layers.size(); ++i) {
        const std::string where = "layer " + std::to_string(i);
        const Layer& layer = s.layers[i];
        if (!(layer.thickness > 0.0) || !std::isfinite(layer.thickness))
            out.push_back({where, "thickness must be > 0", false});
        check_material_into(layer.material, where, out);
        if (i == s.piezo_index && !layer.material.is_piezo())
            out.push_back({where, "designated piezo layer lacks e33/eps33", false});
        if (i != s.piezo_index && layer.material.is_piezo())
            out.push_back({where, "piezo constants on a non-piezo layer", true});
    }

    check_material_into(s.substrate, "substrate", out);
    if (s.top_boundary == TopBoundary::loaded) {
        if (!s.top_load)
            out.push_back({"geometry", "top boundary is loaded but no material given", false});
        else
            check_material_into(*s.top_load, "top load", out);
    }

    // Adjacent mirror layers of equal impedance reflect nothing.
    if (s.piezo_index + 2 < s.layers.size()) {
        for (std::size_t i = s.piezo_index + 2; i + 1 < s.layers.size(); ++i) {
            const double za = acoustic_impedance(s.layers[i].material);
            const double zb = acoustic_impedance(s.layers[i + 1].material);
            if (za > 0.0 && zb > 0.0 && std::abs(za - zb) <= 1e-9 * za)
                out.push_back({"layer " + std::to_string(i),
                               "no impedance contrast with layer " + std::to_string(i + 1),
                               true});
        }
    }

    return out;
}

void require_valid(const Stack& s) {
    for (const auto& v : validate_stack(s))
        if (!v.warning)
            throw std::invalid_argument(v.where + ": " + v.message);
}

double mirror_pairs(const Stack& s) {
    // Mirror = maximal alternating two-material run below the bottom
    // electrode (the layer right under the piezo).
    const std::size_t first = s.piezo_index + 2;
    if (first >= s.layers.size())
        return 0.0;
    const std::string& m0 = s.layers[first].material.name;
    if (first + 1 >= s.layers.size())
        return 0.5;
    const std::string& m1 = s.layers[first + 1].material.name;
    if (m0 == m1)
        return 0.5;
    std::size_t count = 0;
    for (std::size_t i = first; i < s.layers.size(); ++i) {
        const std::string& want = ((i - first) % 2 == 0) ? m0 : m1;
        if (s.layers[i].material.name != want)
            break;
        ++count;
    }
    return static_cast<double>(count) / 2.0;
}

} // namespace smr
