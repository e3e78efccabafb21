#pragma once

#include <string>
#include <vector>

#include "greid/core.hpp"
#include "greid/descriptors.hpp"
#include "greid/error.hpp"

namespace greid::test {

inline GroupObservation observation(const std::vector<Point>& centers, std::string id = "img",
                                    std::string camera = "A", int group = 0) {
    GroupObservation obs{std::move(id), std::move(camera), group, {}, {640, 480}, std::nullopt};
    for (const auto& c : centers) obs.boxes.push_back({c.x - 10.0, c.y - 20.0, 20.0, 40.0});
    return obs;
}

inline FeatureBundle bundle(const GroupObservation& obs, std::vector<Vector> persons) {
    Vector global(persons.front().size(), 0.0);
    for (const auto& p : persons)
        for (std::size_t k = 0; k < p.size(); ++k) global[k] += p[k] / static_cast<double>(persons.size());
    return assemble_bundle(obs, std::move(persons), std::move(global));
}

// Code of the greid::Error thrown by f, empty when nothing is thrown.
template <class F>
std::string error_code(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return {};
}

}  // namespace greid::test
