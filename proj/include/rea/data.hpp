#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace rea {

using RecordId = std::int64_t;
/// Days since 1970-01-01.
using DayNumber = std::int32_t;

DayNumber parse_iso_date(std::string_view text);
std::string format_iso_date(DayNumber day);

/// One transaction. Features are raw (pre-scaling).
struct PropertyRecord {
  RecordId id = 0;
  double lat = 0.0;
  double lon = 0.0;
  std::optional<DayNumber> date;
  double price = 0.0;
  std::optional<double> surface;
  std::vector<double> features;
};

/// Immutable collection of records sharing one feature layout. Construction
/// validates every record; rows are addressed by position or by id.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<std::string> feature_names, std::vector<PropertyRecord> records);

  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  std::size_t feature_dim() const noexcept { return feature_names_.size(); }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }

  const PropertyRecord& operator[](std::size_t row) const { return records_[row]; }
  std::span<const PropertyRecord> records() const noexcept { return records_; }

  std::optional<std::size_t> row_of(RecordId id) const;
  /// Throws ValidationError for unknown ids.
  std::size_t require_row(RecordId id) const;

  bool all_dated() const noexcept { return all_dated_; }
  bool all_have_surface() const noexcept { return all_have_surface_; }

 private:
  std::vector<std::string> feature_names_;
  std::vector<PropertyRecord> records_;
  std::unordered_map<RecordId, std::size_t> row_by_id_;
  bool all_dated_ = false;
  bool all_have_surface_ = false;
};

/// Throws ValidationError describing the first violated record invariant.
void validate_record(const PropertyRecord& record, std::size_t feature_dim);

// ---------------------------------------------------------------------------
// CSV ingestion

/// Column mapping. Unset optional columns are not read. An empty feature
/// list means "every column not mapped to something else, in header order".
struct CsvSchema {
  std::string id = "id";
  std::string lat = "lat";
  std::string lon = "lon";
  std::string price = "price";
  std::optional<std::string> date;
  std::optional<std::string> surface;
  std::vector<std::string> features;

  /// Standard layout: id,lat,lon[,date][,surface],price,f1..fk. Optional
  /// columns are picked up when the header contains them.
  static CsvSchema infer(std::span<const std::string> header);
};

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema);
Dataset parse_csv(std::istream& in, const CsvSchema& schema);
/// Reads only the header row.
std::vector<std::string> read_csv_header(const std::filesystem::path& path);

void write_csv(const Dataset& dataset, std::ostream& out);
void write_csv(const Dataset& dataset, const std::filesystem::path& path);

/// Shortest round-trip decimal form.
std::string format_double(double value);

// ---------------------------------------------------------------------------
// Target values

enum class TargetKind { log_price, log_price_per_sqm };

std::string to_string(TargetKind kind);
TargetKind target_kind_from_string(std::string_view text);

/// v = ln(price) / scale, or ln(price / surface) / scale.
struct TargetTransform {
  TargetKind kind = TargetKind::log_price;
  double scale = 1.0;

  double forward(double price, std::optional<double> surface) const;
  double inverse(double value, std::optional<double> surface) const;
};

double target_value(const PropertyRecord& record, const TargetTransform& transform);
double price_from_value(double value, const PropertyRecord& record, const TargetTransform& transform);

/// Transform whose scale is the mean unscaled target over the given ids.
TargetTransform fit_normalized_transform(const Dataset& dataset, std::span<const RecordId> ids,
                                         TargetKind kind);

nlohmann::json to_json(const TargetTransform& transform);
TargetTransform transform_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Feature scaling

struct ScalerParams {
  static constexpr double kStdFloor = 1e-8;

  std::vector<double> mean;
  std::vector<double> std;

  std::size_t dim() const noexcept { return mean.size(); }
  void apply_into(std::span<const double> raw, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> raw) const;
};

ScalerParams fit_scaler(const Dataset& dataset, std::span<const RecordId> train_ids);

nlohmann::json to_json(const ScalerParams& scaler);
ScalerParams scaler_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Splits

enum class SplitMode { temporal, random };

std::string to_string(SplitMode mode);
SplitMode split_mode_from_string(std::string_view text);

struct SplitSpec {
  SplitMode mode = SplitMode::random;
  double offset_years = 0.0;
  std::vector<RecordId> offset_ids;
  std::vector<RecordId> train_ids;
  std::vector<RecordId> val_ids;
  std::vector<RecordId> test_ids;

  /// offset ∪ train: the records every phase retrieves comparables from.
  std::vector<RecordId> pool_ids() const;
  /// Checks disjointness, coverage, and (temporal) date ordering.
  void validate(const Dataset& dataset) const;
};

nlohmann::json to_json(const SplitSpec& split);
SplitSpec split_from_json(const nlohmann::json& j);

/// Whole days covered by an offset expressed in years (365.25 days/year).
DayNumber offset_days(double offset_years);

SplitSpec temporal_split(const Dataset& dataset, double offset_years, double train_frac,
                         double val_frac);
SplitSpec random_split(const Dataset& dataset, std::uint64_t seed, double train_frac,
                       double val_frac);

}  // namespace rea
