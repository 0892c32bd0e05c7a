#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ttfit/anova.hpp"
#include "ttfit/sampling.hpp"
#include "ttfit/tt_tensor.hpp"

namespace ttfit {

/// Tensor-train JSON layout: {"dims": [...], "ranks": [...],
/// "cores": [...]} with cores as nested [r_left][n][r_right] arrays.
/// Values round-trip bit-exactly.
nlohmann::json tt_to_json(const TtTensor& t);
TtTensor tt_from_json(const nlohmann::json& j);

nlohmann::json anova_to_json(const AnovaModel& m);
AnovaModel anova_from_json(const nlohmann::json& j);

void save_model(const TtTensor& t, const std::string& path);

/// Throws std::runtime_error with the parse location on malformed
/// files, and on structurally invalid content.
TtTensor load_model(const std::string& path);

/// Writes the samples as CSV with columns i_1,...,i_d,y; indices are
/// 1-based in the file, values carry 17 significant digits. A JSON
/// metadata sidecar (same path plus ".meta.json") records the grid
/// shape, sample count, noise level and content hash.
void save_dataset(const Dataset& data, const std::vector<int>& dims,
                  const std::string& path);

/// Reads a dataset written by save_dataset; returns it with the grid
/// shape from the sidecar. Round-trips bit-exactly.
std::pair<Dataset, std::vector<int>> load_dataset(const std::string& path);

/// Content hash of the samples (indices, values, noise level).
std::uint64_t dataset_hash(const Dataset& data);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace ttfit
