#pragma once

#include <string>

#include <json.hpp>

#include "gbmap/boosting.hpp"

namespace gbmap {

inline constexpr int kModelFormatVersion = 1;

/// ModelFile payload. Doubles serialize in shortest round-trip form, so a
/// save/load cycle reproduces predictions exactly. Callback initial models
/// cannot be serialized and throw std::logic_error.
nlohmann::json model_to_json(const GbmapModel& model,
                             const nlohmann::json& provenance = nlohmann::json::object());
GbmapModel model_from_json(const nlohmann::json& j);

nlohmann::json preprocess_to_json(const PreprocessStats& stats);
PreprocessStats preprocess_from_json(const nlohmann::json& j);

/// Writes via a temp file in the same directory plus rename, so readers never
/// observe a half-written model.
void save_model(const GbmapModel& model, const std::string& path,
                const nlohmann::json& provenance = nlohmann::json::object());

/// Throws DataError for unreadable files, malformed JSON, or an unsupported
/// format_version.
GbmapModel load_model(const std::string& path);

void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace gbmap
