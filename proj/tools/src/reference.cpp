#include "reference.hpp"

#include "json.hpp"
#include "reference_cases.hpp"

namespace rephase::cli {

namespace {

std::array<double, 3> triple(const nlohmann::json& j) {
    return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

FuelRow fuel_row(const nlohmann::json& j) {
    return {triple(j.at("lx")), j.at("lt").get<double>(), j.at("J_norm").get<double>()};
}

ReferenceCases parse() {
    const auto doc = nlohmann::json::parse(detail::kReferenceCasesJson);
    ReferenceCases out;
    for (const auto& c : doc.at("time")) {
        TimeCase t{c.at("id").get<std::string>(),
                   c.at("dt_f").get<double>(),
                   c.at("a_max").get<double>(),
                   c.at("chi").get<double>(),
                   {triple(c.at("linear").at("lx")), c.at("linear").at("dL").get<double>()},
                   {triple(c.at("nonlinear").at("lx")), c.at("nonlinear").at("dL").get<double>()},
                   std::nullopt,
                   0.0,
                   std::nullopt};
        if (c.contains("dL_error")) {
            const auto& e = c.at("dL_error");
            if (e.contains("value")) {
                t.dL_error = e.at("value").get<double>();
                t.dL_error_tol = e.at("tol").get<double>();
            }
            if (e.contains("max")) t.dL_error_max = e.at("max").get<double>();
        }
        out.time.push_back(t);
    }
    for (const auto& c : doc.at("fuel")) {
        out.fuel.push_back({c.at("id").get<std::string>(), c.at("dL").get<double>(),
                            c.at("eta").get<double>(), c.at("dt_f").get<double>(),
                            c.at("a_max").get<double>(), c.at("epsilon").get<double>(),
                            fuel_row(c.at("linear")), fuel_row(c.at("nonlinear")),
                            fuel_row(c.at("optimal")), c.at("n_arcs").get<std::vector<int>>()});
    }
    return out;
}

}  // namespace

const ReferenceCases& reference_cases() {
    static const ReferenceCases cases = parse();
    return cases;
}

}  // namespace rephase::cli
