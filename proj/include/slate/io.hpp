#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "slate/data_gen.hpp"
#include "slate/experiments.hpp"
#include "slate/inference.hpp"
#include "slate/model.hpp"
#include "slate/rng.hpp"

namespace slate {

// Version of every file schema written below.
inline constexpr const char* kSchemaVersion = "1.0";

class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Dataset CSV: header `slate,nc,c_1,...,c_K`, slate column is `;`-joined item
// indices, one row per slate, LF line endings. Only raw datasets are written.
void write_dataset_csv(std::ostream& out, const Dataset& dataset);

// Item order inside the slate column may be arbitrary; click columns are
// permuted with it into canonical order. Catalog size defaults to the largest
// item index + 1. Errors name the offending row (1-based, header = 1) and column.
Dataset read_dataset_csv(std::istream& in, std::optional<std::size_t> catalog_size = std::nullopt);

struct DatasetMetadata {
  std::size_t catalog_size = 0;
  std::size_t slate_size = 0;
  Count samples_per_slate = 0;
  std::uint64_t seed = 0;
  std::string rng_algorithm;
  ModelParams true_params;
};

DatasetMetadata metadata_for(const GeneratorSpec& spec);

nlohmann::json to_json(const ModelParams& params);
// Accepts a bare {"theta", "phi"} object, or one nested under "params" or
// "true_params" (MapResult and dataset metadata files).
ModelParams params_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DatasetMetadata& meta);
DatasetMetadata metadata_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PriorConfig& prior);
nlohmann::json to_json(const MapResult& result);
nlohmann::json to_json(const PosteriorSamples& samples);
// One row per sample, natural-scale parameters.
void write_samples_csv(std::ostream& out, const PosteriorSamples& samples);

nlohmann::json to_json(const ExperimentConfig& config);
nlohmann::json to_json(const ExperimentReport& report);
// `sweep_value,model,mean,std,n_replications,n_failed`
void write_report_csv(std::ostream& out, const ExperimentReport& report);

nlohmann::json to_json(const ViolinResult& result);
// `model,sample_index,l1`
void write_violin_csv(std::ostream& out, const ViolinResult& result);

// Files are written to a temporary sibling and renamed into place on commit().
// Anything not committed, or everything when a later file fails, is removed.
class OutputSet {
public:
  OutputSet() = default;
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;
  ~OutputSet();

  void add(const std::filesystem::path& path, const std::string& contents);
  void commit();

private:
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> staged_;
  std::vector<std::filesystem::path> committed_;
  bool done_ = false;
};

std::string read_file(const std::filesystem::path& path);

}  // namespace slate
