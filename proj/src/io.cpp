#include "mesoamp/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace mesoamp {

std::string format_double(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc()) {
        throw std::runtime_error("format_double: conversion failed");
    }
    return std::string(buf, ptr);
}

std::string csv_row(const std::vector<double>& values) {
    std::string row;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            row += ',';
        }
        row += format_double(values[i]);
    }
    return row;
}

nlohmann::json fit_to_json(const PowerFit& fit) {
    return nlohmann::json{{"a", fit.a},
                          {"b", fit.b},
                          {"c", fit.c},
                          {"amplitude_unit", amplitude_unit_name(fit.amplitude_unit)},
                          {"rmse", fit.rmse},
                          {"r_square", fit.r_square},
                          {"n_points", fit.n_points},
                          {"source", fit.source}};
}

PowerFit fit_from_json(const nlohmann::json& j) {
    PowerFit fit;
    fit.a = j.at("a").get<double>();
    fit.b = j.at("b").get<double>();
    fit.c = j.at("c").get<double>();
    fit.amplitude_unit = amplitude_unit_from_name(j.at("amplitude_unit").get<std::string>());
    fit.rmse = j.value("rmse", 0.0);
    fit.r_square = j.value("r_square", 1.0);
    fit.n_points = j.value("n_points", 0);
    fit.source = j.value("source", std::string());
    return fit;
}

nlohmann::json plan_to_json(const MultistagePlan& plan, const std::string& fit_source) {
    return nlohmann::json{{"k", plan.k},
                          {"gains", plan.gains},
                          {"a_in", plan.a_in},
                          {"total_gain", plan.total_gain},
                          {"per_stage_power", plan.per_stage_power},
                          {"total_power", plan.total_power},
                          {"savings_vs_single", plan.savings_vs_single},
                          {"fit_source", fit_source}};
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    out << content;
    if (!out) {
        throw std::runtime_error("write failed: " + path);
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open for reading: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}
