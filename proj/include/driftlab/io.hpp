#pragma once

// JSON, CSV and DOT encodings of chains, coefficient tables, bound reports
// and knapsack instances.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "driftlab/chain_model.hpp"
#include "driftlab/drift_coeffs.hpp"
#include "driftlab/knapsack_bench.hpp"
#include "driftlab/time_bounds.hpp"

namespace driftlab::io {

using Json = nlohmann::ordered_json;

/// {"mode", "states":[{"id","fitness","optimal"}], "rows":[{"from","to","p"}]}.
/// Numbers in a rational-mode file are read through their shortest decimal
/// form, so 0.6 becomes 3/5.
NumericMode chain_mode(const Json& doc);
template <typename T>
Chain<T> chain_from_json(const Json& doc);
template <typename T>
Json chain_to_json(const Chain<T>& chain);

Json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// FNV-1a 64-bit digest as 16 hex digits; identifies inputs in run records.
std::string digest(std::string_view bytes);

/// Vertices ordered by level, labeled with level, fitness and member ids;
/// one edge per arc.
template <typename T>
std::string level_graph_dot(const Chain<T>& chain, const LevelPartition& partition, const LevelGraph& graph);

/// "k,l,value,method,direction" rows for 1 <= l < k.
template <typename T>
std::string coefficient_csv(const CoefficientTable<T>& table);

template <typename T>
Json bound_report_json(const BoundReport<T>& report);
/// "level,coefficient,climb,contribution" rows.
template <typename T>
std::string bound_report_csv(const BoundReport<T>& report);

Json instance_to_json(const KnapsackInstance& instance);
KnapsackInstance instance_from_json(const Json& doc);

}  // namespace driftlab::io
