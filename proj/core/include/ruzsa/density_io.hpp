#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "ruzsa/density.hpp"
#include "ruzsa/joint_pmf.hpp"

namespace ruzsa {

// Density documents, schema version 1:
//   {"version": 1, "type": "finite", "group": {...}, "probs": [...]}
//   {"version": 1, "type": "grid", "group": {...},
//    "box": {"lo": [...], "hi": [...], "cells": [...], "periodic": [...]},
//    "masses": [...], "truncated_mass": t}
//   {"version": 1, "type": "parametric", "params": {"family": "gaussian", "mean": [...], "cov": [[...]]}}
//   {"version": 1, "type": "joint", "groups": [{...}, ...], "tensor": [...]}
// Parametric families: gaussian(mean, cov), exponential(rate), uniform(lo, hi),
// laplace(location, scale), gamma(shape, rate), lognormal(mu, sigma).
nlohmann::json density_to_json(const Density& d);
Density density_from_json(const nlohmann::json& j);

nlohmann::json joint_to_json(const JointPMF& j);
JointPMF joint_from_json(const nlohmann::json& j);

// File helpers; errors name the offending path.
void write_density(const std::filesystem::path& path, const Density& d);
Density read_density(const std::filesystem::path& path);
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// "index,coordinates...,mass" rows (cell midpoints for grids).
std::string masses_csv(const Density& d);

}  // namespace ruzsa
