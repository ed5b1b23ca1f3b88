#include "slate/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

namespace slate {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string::size_type start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    parts.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

[[noreturn]] void fail(std::size_t row, std::size_t column, const std::string& what) {
  throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(column) + ": " + what);
}

std::uint64_t parse_count(const std::string& field, std::size_t row, std::size_t column) {
  std::uint64_t value = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last)
    fail(row, column, "expected a nonnegative integer, got '" + field + "'");
  return value;
}

json nan_to_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

void write_dataset_csv(std::ostream& out, const Dataset& dataset) {
  if (dataset.view() != DatasetView::Raw)
    throw std::invalid_argument("only raw datasets are written as CSV");
  out << "slate,nc";
  for (std::size_t i = 1; i <= dataset.slate_size(); ++i) out << ",c_" << i;
  out << '\n';
  for (const auto& rec : dataset.records()) {
    for (std::size_t i = 0; i < rec.slate.size(); ++i) out << (i ? ";" : "") << rec.slate[i];
    out << ',' << rec.non_clicks;
    for (auto c : rec.clicks) out << ',' << c;
    out << '\n';
  }
}

Dataset read_dataset_csv(std::istream& in, std::optional<std::size_t> catalog_size) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty dataset: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line, ',');
  if (header.size() < 4 || header[0] != "slate" || header[1] != "nc")
    throw ParseError("row 1: header must be 'slate,nc,c_1,...,c_K' with K >= 2");
  const std::size_t k = header.size() - 2;
  for (std::size_t i = 0; i < k; ++i) {
    if (header[i + 2] != "c_" + std::to_string(i + 1))
      fail(1, i + 3, "expected header 'c_" + std::to_string(i + 1) + "'");
  }

  std::vector<SlateRecord> records;
  std::size_t max_item = 0;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != k + 2)
      fail(row, std::min(fields.size(), k + 2) + 1,
           "expected " + std::to_string(k + 2) + " columns, found " + std::to_string(fields.size()));
    const auto item_fields = split(fields[0], ';');
    if (item_fields.size() != k)
      fail(row, 1, "slate has " + std::to_string(item_fields.size()) + " items, header implies " +
                       std::to_string(k));
    std::vector<std::pair<ItemIndex, Count>> pairs;
    for (std::size_t i = 0; i < k; ++i) {
      const auto item = parse_count(item_fields[i], row, 1);
      if (item > std::numeric_limits<ItemIndex>::max()) fail(row, 1, "item index too large");
      pairs.emplace_back(static_cast<ItemIndex>(item), parse_count(fields[i + 2], row, i + 3));
      max_item = std::max<std::size_t>(max_item, item);
    }
    std::sort(pairs.begin(), pairs.end());
    SlateRecord rec;
    std::vector<ItemIndex> items;
    for (const auto& [item, clicks] : pairs) {
      items.push_back(item);
      rec.clicks.push_back(clicks);
    }
    try {
      rec.slate = Slate(std::move(items));
    } catch (const std::invalid_argument& e) {
      fail(row, 1, e.what());
    }
    rec.non_clicks = parse_count(fields[1], row, 2);
    records.push_back(std::move(rec));
  }
  const std::size_t n = catalog_size.value_or(std::max(max_item + 1, k));
  try {
    return Dataset(n, k, DatasetView::Raw, std::move(records));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

DatasetMetadata metadata_for(const GeneratorSpec& spec) {
  return {spec.catalog_size, spec.slate_size, spec.samples_per_slate, spec.seed,
          std::string(kRngAlgorithm), spec.true_params};
}

json to_json(const ModelParams& params) {
  json j;
  j["theta"] = params.theta;
  if (params.phi) j["phi"] = *params.phi;
  return j;
}

ModelParams params_from_json(const json& j) {
  const json* source = &j;
  if (!j.contains("theta")) {
    if (j.contains("params")) source = &j.at("params");
    else if (j.contains("true_params")) source = &j.at("true_params");
    else throw ParseError("no parameter object ('theta') found");
  }
  ModelParams params;
  try {
    params.theta = source->at("theta").get<std::vector<double>>();
    if (source->contains("phi") && !source->at("phi").is_null())
      params.phi = source->at("phi").get<double>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed parameter object: ") + e.what());
  }
  params.validate();
  return params;
}

json to_json(const DatasetMetadata& meta) {
  return {{"spec_version", kSchemaVersion},
          {"catalog_size", meta.catalog_size},
          {"slate_size", meta.slate_size},
          {"samples_per_slate", meta.samples_per_slate},
          {"seed", meta.seed},
          {"rng_algorithm", meta.rng_algorithm},
          {"true_params", to_json(meta.true_params)}};
}

DatasetMetadata metadata_from_json(const json& j) {
  DatasetMetadata meta;
  try {
    meta.catalog_size = j.at("catalog_size").get<std::size_t>();
    meta.slate_size = j.at("slate_size").get<std::size_t>();
    meta.samples_per_slate = j.at("samples_per_slate").get<Count>();
    meta.seed = j.at("seed").get<std::uint64_t>();
    meta.rng_algorithm = j.value("rng_algorithm", "");
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed dataset metadata: ") + e.what());
  }
  meta.true_params = params_from_json(j.at("true_params"));
  return meta;
}

json to_json(const PriorConfig& prior) {
  return {{"theta_shape", prior.theta_shape},
          {"theta_rate", prior.theta_rate},
          {"phi_shape", prior.phi_shape},
          {"phi_rate", prior.phi_rate}};
}

json to_json(const MapResult& result) {
  const auto names = parameter_names(result.kind, result.params.theta.size());
  std::vector<double> values = result.params.theta;
  if (result.params.phi) values.push_back(*result.params.phi);
  return {{"spec_version", kSchemaVersion},
          {"model", std::string(to_string(result.kind))},
          {"parameter_names", names},
          {"parameter_values", values},
          {"params", to_json(result.params)},
          {"log_posterior", result.log_posterior_value},
          {"iterations", result.iterations},
          {"converged", result.converged},
          {"final_gradient_norm", result.final_gradient_norm}};
}

json to_json(const PosteriorSamples& samples) {
  json rows = json::array();
  for (std::size_t i = 0; i < samples.num_samples; ++i) {
    const auto r = samples.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return {{"spec_version", kSchemaVersion},
          {"model", std::string(to_string(samples.kind))},
          {"parameter_names", samples.parameter_names},
          {"space", "log"},
          {"num_samples", samples.num_samples},
          {"acceptance_rate", samples.acceptance_rate},
          {"proposal_scale", samples.proposal_scale},
          {"acceptance_warning", samples.acceptance_warning},
          {"log_samples", rows}};
}

void write_samples_csv(std::ostream& out, const PosteriorSamples& samples) {
  out << "sample_index";
  for (const auto& name : samples.parameter_names) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < samples.num_samples; ++i) {
    out << i;
    for (double v : samples.row(i)) out << ',' << format_double(std::exp(v));
    out << '\n';
  }
}

json to_json(const ExperimentConfig& config) {
  std::vector<std::string> models;
  for (auto m : config.models) models.emplace_back(to_string(m));
  return {{"sweep", std::string(to_string(config.sweep))},
          {"values", config.values},
          {"catalog_size", config.catalog_size},
          {"slate_size", config.slate_size},
          {"samples_per_slate", config.samples_per_slate},
          {"replications", config.replications},
          {"base_seed", config.base_seed},
          {"models", models},
          {"metric", std::string(to_string(config.metric()))},
          {"all_positions", config.all_positions},
          {"prior", to_json(config.prior)},
          {"map",
           {{"max_iterations", config.map.max_iterations},
            {"gradient_tolerance", config.map.gradient_tolerance},
            {"initial_step", config.map.initial_step},
            {"backtracking", config.map.backtracking},
            {"armijo", config.map.armijo}}},
          {"mcmc",
           {{"num_samples", config.mcmc.num_samples},
            {"burn_in", config.mcmc.burn_in},
            {"thin", config.mcmc.thin},
            {"target_acceptance", config.mcmc.target_acceptance},
            {"adaptation_window", config.mcmc.adaptation_window},
            {"seed", config.mcmc.seed}}},
          {"threads", config.threads}};
}

json to_json(const ExperimentReport& report) {
  json cells = json::array();
  for (const auto& c : report.cells) {
    json raw = json::array();
    for (double v : c.raw) raw.push_back(nan_to_null(v));
    cells.push_back({{"sweep_value", c.sweep_value},
                     {"model", std::string(to_string(c.model))},
                     {"mean", nan_to_null(c.mean)},
                     {"std", c.std},
                     {"n_replications", c.n_replications},
                     {"n_failed", c.n_failed},
                     {"n_unconverged", c.n_unconverged},
                     {"unreliable", c.unreliable},
                     {"raw", raw}});
  }
  return {{"spec_version", kSchemaVersion},
          {"version", report.version},
          {"config", to_json(report.config)},
          {"wall_clock_seconds", report.wall_clock_seconds},
          {"cells", cells}};
}

void write_report_csv(std::ostream& out, const ExperimentReport& report) {
  out << "sweep_value,model,mean,std,n_replications,n_failed\n";
  for (const auto& c : report.cells) {
    out << c.sweep_value << ',' << to_string(c.model) << ',' << format_double(c.mean) << ','
        << format_double(c.std) << ',' << c.n_replications << ',' << c.n_failed << '\n';
  }
}

json to_json(const ViolinResult& result) {
  json series = json::array();
  for (const auto& s : result.series) {
    series.push_back({{"model", std::string(to_string(s.model))},
                      {"acceptance_rate", s.acceptance_rate},
                      {"acceptance_warning", s.acceptance_warning},
                      {"mean", mean_of(s.l1)},
                      {"std", sample_std(s.l1)},
                      {"l1", s.l1}});
  }
  return {{"spec_version", kSchemaVersion},
          {"version", version_string()},
          {"catalog_size", result.catalog_size},
          {"slate_size", result.slate_size},
          {"samples_per_slate", result.samples_per_slate},
          {"seed", result.seed},
          {"series", series}};
}

void write_violin_csv(std::ostream& out, const ViolinResult& result) {
  out << "model,sample_index,l1\n";
  for (const auto& s : result.series) {
    for (std::size_t i = 0; i < s.l1.size(); ++i)
      out << to_string(s.model) << ',' << i << ',' << format_double(s.l1[i]) << '\n';
  }
}

OutputSet::~OutputSet() {
  std::error_code ec;
  for (const auto& [tmp, dest] : staged_) std::filesystem::remove(tmp, ec);
  if (!done_) {
    for (const auto& p : committed_) std::filesystem::remove(p, ec);
  }
}

void OutputSet::add(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("failed writing " + tmp.string());
    }
  }
  staged_.emplace_back(tmp, path);
}

void OutputSet::commit() {
  for (auto it = staged_.begin(); it != staged_.end();) {
    std::filesystem::rename(it->first, it->second);
    committed_.push_back(it->second);
    it = staged_.erase(it);
  }
  done_ = true;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace slate
