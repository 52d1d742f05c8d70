#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "apidomain/common/error.hpp"
#include "apidomain/common/jsonl.hpp"
#include "apidomain/common/matrix.hpp"
#include "apidomain/ingestion/csv.hpp"

namespace apidomain {

struct MultiLabelDataset {
  FeatureMatrix features;
  LabelMatrix labels;
  std::vector<std::string> label_names;
  std::vector<std::string> row_ids;
  std::vector<std::uint8_t> synthetic;  // empty, or one flag per row

  std::size_t rows() const { return row_ids.size(); }

  bool is_synthetic(std::size_t r) const { return !synthetic.empty() && synthetic[r] != 0; }

  void validate() const {
    if (features.rows() != rows() || labels.rows() != rows())
      throw IntegrityError("dataset row counts disagree: features " + std::to_string(features.rows()) +
                           ", labels " + std::to_string(labels.rows()) + ", ids " + std::to_string(rows()));
    if (labels.cols() != label_names.size())
      throw IntegrityError("label matrix has " + std::to_string(labels.cols()) + " columns but " +
                           std::to_string(label_names.size()) + " names");
    if (!synthetic.empty() && synthetic.size() != rows()) throw IntegrityError("synthetic flags length mismatch");
    std::unordered_set<std::string> seen;
    for (const auto& id : row_ids)
      if (!seen.insert(id).second) throw IntegrityError("duplicate row id '" + id + "'");
  }

  MultiLabelDataset select_rows(const std::vector<std::size_t>& idx) const {
    MultiLabelDataset out;
    out.features = features.select_rows(idx);
    out.labels = labels.select_rows(idx);
    out.label_names = label_names;
    for (auto i : idx) out.row_ids.push_back(row_ids[i]);
    if (!synthetic.empty())
      for (auto i : idx) out.synthetic.push_back(synthetic[i]);
    return out;
  }

  MultiLabelDataset select_labels(const std::vector<std::size_t>& cols) const {
    MultiLabelDataset out = *this;
    out.labels = labels.select_cols(cols);
    out.label_names.clear();
    for (auto c : cols) out.label_names.push_back(label_names[c]);
    return out;
  }

  bool operator==(const MultiLabelDataset&) const = default;
};

inline std::vector<std::size_t> label_positives(const LabelMatrix& y) {
  std::vector<std::size_t> out(y.cols(), 0);
  for (std::size_t r = 0; r < y.rows(); ++r)
    for (std::size_t c = 0; c < y.cols(); ++c) out[c] += y(r, c) ? 1 : 0;
  return out;
}

struct LabelDiagnostics {
  double cardinality = 0.0;
  double density = 0.0;
};

inline LabelDiagnostics diagnostics(const LabelMatrix& y) {
  if (y.cols() == 0) throw DataError("label diagnostics need at least one label column");
  if (y.rows() == 0) throw DataError("label diagnostics need at least one row");
  std::size_t total = 0;
  for (auto v : y.data()) total += v ? 1 : 0;
  LabelDiagnostics d;
  d.cardinality = static_cast<double>(total) / static_cast<double>(y.rows());
  d.density = d.cardinality / static_cast<double>(y.cols());
  return d;
}

enum class DropReason { absent, over_threshold };

inline std::string to_string(DropReason r) { return r == DropReason::absent ? "absent" : "over_threshold"; }

struct DroppedLabel {
  std::string name;
  DropReason reason = DropReason::absent;
  std::size_t positives = 0;
  double rate = 0.0;
};

inline void to_json(nlohmann::json& j, const DroppedLabel& d) {
  j = {{"name", d.name}, {"reason", to_string(d.reason)}, {"positives", d.positives}, {"rate", d.rate}};
}

struct FilteredDataset {
  MultiLabelDataset dataset;
  std::vector<DroppedLabel> dropped;
};

/// Drops label columns with no positives or a positive rate above max_fraction.
inline FilteredDataset filter_labels(const MultiLabelDataset& ds, double max_fraction = 0.9) {
  if (!(max_fraction > 0.0 && max_fraction <= 1.0))
    throw ParameterError("label filter threshold must lie in (0, 1]");
  if (ds.rows() == 0) throw DatasetTooSmallError("cannot filter labels of an empty dataset");
  const auto pos = label_positives(ds.labels);
  FilteredDataset out;
  std::vector<std::size_t> keep;
  const double n = static_cast<double>(ds.rows());
  for (std::size_t c = 0; c < pos.size(); ++c) {
    const double rate = static_cast<double>(pos[c]) / n;
    if (pos[c] == 0) {
      out.dropped.push_back({ds.label_names[c], DropReason::absent, 0, 0.0});
    } else if (rate > max_fraction) {
      out.dropped.push_back({ds.label_names[c], DropReason::over_threshold, pos[c], rate});
    } else {
      keep.push_back(c);
    }
  }
  if (keep.empty()) throw EmptyLabelError("every label column was dropped by the label filter");
  out.dataset = ds.select_labels(keep);
  return out;
}

/// Reorders/zero-fills label columns so they match `names` exactly.
inline MultiLabelDataset align_labels(const MultiLabelDataset& ds, const std::vector<std::string>& names) {
  std::map<std::string, std::size_t> at;
  for (std::size_t c = 0; c < ds.label_names.size(); ++c) at.emplace(ds.label_names[c], c);
  MultiLabelDataset out = ds;
  out.labels = LabelMatrix(ds.rows(), names.size(), 0);
  out.label_names = names;
  for (std::size_t j = 0; j < names.size(); ++j) {
    auto it = at.find(names[j]);
    if (it == at.end()) continue;
    for (std::size_t r = 0; r < ds.rows(); ++r) out.labels(r, j) = ds.labels(r, it->second);
  }
  return out;
}

// --- persistence -----------------------------------------------------------
//   features.json  {"rows","cols","dtype":"float64","order":"row-major","byte_order"}
//   features.bin   raw matrix
//   labels.csv     row_id,<label names...>
//   provenance.json

inline void save_dataset(const std::filesystem::path& dir, const MultiLabelDataset& ds,
                         const nlohmann::json& provenance = nlohmann::json::object()) {
  ds.validate();
  std::filesystem::create_directories(dir);
  write_json(dir / "features.json",
             {{"format_version", 1},
              {"rows", ds.features.rows()},
              {"cols", ds.features.cols()},
              {"dtype", "float64"},
              {"order", "row-major"},
              {"byte_order", std::endian::native == std::endian::little ? "little" : "big"}});
  {
    std::ofstream bin(dir / "features.bin", std::ios::binary | std::ios::trunc);
    if (!bin) throw UserError("cannot write " + (dir / "features.bin").string());
    bin.write(reinterpret_cast<const char*>(ds.features.data().data()),
              static_cast<std::streamsize>(ds.features.data().size() * sizeof(double)));
  }
  std::string csv;
  std::vector<std::string> header{"row_id"};
  header.insert(header.end(), ds.label_names.begin(), ds.label_names.end());
  csv += csv_line(header);
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    std::vector<std::string> f{ds.row_ids[r]};
    for (std::size_t c = 0; c < ds.labels.cols(); ++c) f.push_back(ds.labels(r, c) ? "1" : "0");
    csv += csv_line(f);
  }
  text::write_file(dir / "labels.csv", csv);
  write_json(dir / "provenance.json", provenance);
}

inline MultiLabelDataset load_dataset(const std::filesystem::path& dir) {
  MultiLabelDataset ds;
  const auto header = read_json(dir / "features.json");
  if (header.value("dtype", "") != "float64" || header.value("order", "") != "row-major")
    throw SchemaError("features.json: only row-major float64 matrices are supported");
  const std::string native = std::endian::native == std::endian::little ? "little" : "big";
  if (header.value("byte_order", native) != native) throw SchemaError("features.bin byte order differs from host");
  const auto rows = header.at("rows").get<std::size_t>();
  const auto cols = header.at("cols").get<std::size_t>();
  std::vector<double> data(rows * cols);
  {
    const auto path = dir / "features.bin";
    std::ifstream bin(path, std::ios::binary);
    if (!bin) throw UserError("cannot open " + path.string());
    const auto expected = data.size() * sizeof(double);
    if (std::filesystem::file_size(path) != expected)
      throw SchemaError(path.string() + ": size does not match header (" + std::to_string(expected) + " bytes)");
    bin.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(expected));
  }
  ds.features = FeatureMatrix(rows, cols, std::move(data));

  const auto records = parse_csv(text::read_file(dir / "labels.csv"));
  if (records.empty() || records.front().fields.empty() || records.front().fields[0] != "row_id")
    throw SchemaError("labels.csv: missing row_id header");
  ds.label_names.assign(records.front().fields.begin() + 1, records.front().fields.end());
  ds.labels = LabelMatrix(0, ds.label_names.size());
  std::vector<std::uint8_t> row(ds.label_names.size());
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i].fields;
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != ds.label_names.size() + 1)
      throw SchemaError("labels.csv line " + std::to_string(records[i].line) + ": wrong number of fields");
    ds.row_ids.push_back(f[0]);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (f[c + 1] != "0" && f[c + 1] != "1")
        throw SchemaError("labels.csv line " + std::to_string(records[i].line) + ": label cells must be 0 or 1");
      row[c] = f[c + 1] == "1";
    }
    ds.labels.append_row(row);
  }
  if (ds.labels.rows() == 0) ds.labels = LabelMatrix(0, ds.label_names.size());
  ds.validate();
  return ds;
}

}  // namespace apidomain
