#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "oblique_beam/problem_model.hpp"

namespace oblique_beam {

/// Instance file layout:
///   {"L", "K", "M",
///    "channels": [j][l*K + k][m] -> [re, im],
///    "noise_power": [l][k], "targets": [l], "budgets": [l]}
namespace instance_json {

using nlohmann::json;

inline const json& require(const json& doc, const char* field) {
  if (!doc.is_object()) throw InvalidInput("instance", "expected a JSON object");
  auto it = doc.find(field);
  if (it == doc.end()) throw InvalidInput(field, "missing field");
  return *it;
}

inline int require_int(const json& doc, const char* field) {
  const json& v = require(doc, field);
  if (!v.is_number_integer()) throw InvalidInput(field, "expected an integer");
  return v.get<int>();
}

inline double as_number(const json& v, const char* field) {
  if (!v.is_number()) throw InvalidInput(field, "expected a number");
  return v.get<double>();
}

inline Complex as_complex(const json& v, const char* field) {
  if (!v.is_array() || v.size() != 2)
    throw InvalidInput(field, "complex values must be [re, im] pairs");
  return {as_number(v[0], field), as_number(v[1], field)};
}

inline json complex_to_json(const Complex& z) {
  return json::array({z.real(), z.imag()});
}

inline void expect_array(const json& v, std::size_t n, const char* field) {
  if (!v.is_array() || v.size() != n)
    throw InvalidInput(field, "expected an array of " + std::to_string(n) +
                                  " entries");
}

inline RealVector per_cell(const json& doc, const char* field, std::size_t L) {
  const json& arr = require(doc, field);
  expect_array(arr, L, field);
  RealVector v(static_cast<Eigen::Index>(L));
  for (std::size_t l = 0; l < L; ++l)
    v(static_cast<Eigen::Index>(l)) = as_number(arr[l], field);
  return v;
}

/// Parses and validates; failures name the offending field.
inline NetworkInstance from_json(const json& doc) {
  NetworkInstance inst;
  inst.L = require_int(doc, "L");
  inst.K = require_int(doc, "K");
  inst.M = require_int(doc, "M");
  if (inst.L < 1) throw InvalidInput("L", "must be >= 1");
  if (inst.K < 1) throw InvalidInput("K", "must be >= 1");
  if (inst.M < 1) throw InvalidInput("M", "must be >= 1");
  const auto L = static_cast<std::size_t>(inst.L);
  const auto K = static_cast<std::size_t>(inst.K);
  const auto M = static_cast<std::size_t>(inst.M);

  const json& ch = require(doc, "channels");
  expect_array(ch, L, "channels");
  for (std::size_t j = 0; j < L; ++j) {
    expect_array(ch[j], L * K, "channels");
    ComplexMatrix block(inst.M, inst.L * inst.K);
    for (std::size_t u = 0; u < L * K; ++u) {
      expect_array(ch[j][u], M, "channels");
      for (std::size_t m = 0; m < M; ++m)
        block(m, u) = as_complex(ch[j][u][m], "channels");
    }
    inst.channels.push_back(std::move(block));
  }

  const json& noise = require(doc, "noise_power");
  expect_array(noise, L, "noise_power");
  inst.noise_power.resize(inst.L, inst.K);
  for (std::size_t l = 0; l < L; ++l) {
    expect_array(noise[l], K, "noise_power");
    for (std::size_t k = 0; k < K; ++k)
      inst.noise_power(l, k) = as_number(noise[l][k], "noise_power");
  }

  inst.targets = per_cell(doc, "targets", L);
  inst.budgets = per_cell(doc, "budgets", L);

  inst.validate();
  return inst;
}

inline json to_json(const NetworkInstance& inst) {
  json doc;
  doc["L"] = inst.L;
  doc["K"] = inst.K;
  doc["M"] = inst.M;
  json ch = json::array();
  for (int j = 0; j < inst.L; ++j) {
    json block = json::array();
    for (int u = 0; u < inst.users(); ++u) {
      json vec = json::array();
      for (int m = 0; m < inst.M; ++m)
        vec.push_back(complex_to_json(inst.channels[j](m, u)));
      block.push_back(std::move(vec));
    }
    ch.push_back(std::move(block));
  }
  doc["channels"] = std::move(ch);
  json noise = json::array();
  for (int l = 0; l < inst.L; ++l) {
    json row = json::array();
    for (int k = 0; k < inst.K; ++k) row.push_back(inst.noise_power(l, k));
    noise.push_back(std::move(row));
  }
  doc["noise_power"] = std::move(noise);
  doc["targets"] = std::vector<double>(inst.targets.data(),
                                       inst.targets.data() + inst.L);
  doc["budgets"] = std::vector<double>(inst.budgets.data(),
                                       inst.budgets.data() + inst.L);
  return doc;
}

}  // namespace instance_json
}  // namespace oblique_beam
