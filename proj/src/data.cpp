#include "rea/data.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>

#include "rea/error.hpp"

namespace rea {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(trim(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(trim(cell));
  return cells;
}

std::optional<double> parse_double(std::string_view text) {
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::optional<RecordId> parse_id(std::string_view text) {
  RecordId value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return value;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw SchemaError("missing column '" + name + "' in CSV header");
  return static_cast<std::size_t>(it - header.begin());
}

std::size_t fraction_count(double frac, std::size_t n) {
  return static_cast<std::size_t>(std::floor(frac * static_cast<double>(n) + 1e-9));
}

void check_fractions(double train_frac, double val_frac) {
  if (!(train_frac > 0.0) || !(val_frac >= 0.0) || !(train_frac + val_frac < 1.0)) {
    throw ValidationError("split fractions must satisfy train > 0, val >= 0, train + val < 1");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

DayNumber parse_iso_date(std::string_view text) {
  using namespace std::chrono;
  int y = 0;
  unsigned m = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw ValidationError("bad date '" + std::string(text) + "', expected YYYY-MM-DD");
  }
  auto parse_part = [&](std::size_t pos, std::size_t len, auto& out) {
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
    if (ec != std::errc{} || ptr != text.data() + pos + len) {
      throw ValidationError("bad date '" + std::string(text) + "', expected YYYY-MM-DD");
    }
  };
  parse_part(0, 4, y);
  parse_part(5, 2, m);
  parse_part(8, 2, d);
  year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) throw ValidationError("invalid calendar date '" + std::string(text) + "'");
  return static_cast<DayNumber>(sys_days{ymd}.time_since_epoch().count());
}

std::string format_iso_date(DayNumber day) {
  using namespace std::chrono;
  year_month_day ymd{sys_days{days{day}}};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------

void validate_record(const PropertyRecord& r, std::size_t feature_dim) {
  auto fail = [&](const std::string& msg) {
    throw ValidationError("record " + std::to_string(r.id) + ": " + msg);
  };
  if (!std::isfinite(r.lat) || r.lat < -90.0 || r.lat > 90.0) fail("latitude out of [-90, 90]");
  if (!std::isfinite(r.lon) || r.lon < -180.0 || r.lon > 180.0) fail("longitude out of [-180, 180]");
  if (!std::isfinite(r.price) || !(r.price > 0.0)) fail("price must be positive");
  if (r.surface && (!std::isfinite(*r.surface) || !(*r.surface > 0.0))) fail("surface must be positive");
  if (r.features.size() != feature_dim) {
    fail("expected " + std::to_string(feature_dim) + " features, got " +
         std::to_string(r.features.size()));
  }
  for (double f : r.features) {
    if (!std::isfinite(f)) fail("non-finite feature value");
  }
}

Dataset::Dataset(std::vector<std::string> feature_names, std::vector<PropertyRecord> records)
    : feature_names_(std::move(feature_names)), records_(std::move(records)) {
  all_dated_ = !records_.empty();
  all_have_surface_ = !records_.empty();
  row_by_id_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    validate_record(r, feature_names_.size());
    if (!row_by_id_.emplace(r.id, i).second) {
      throw ValidationError("duplicate record id " + std::to_string(r.id));
    }
    all_dated_ = all_dated_ && r.date.has_value();
    all_have_surface_ = all_have_surface_ && r.surface.has_value();
  }
}

std::optional<std::size_t> Dataset::row_of(RecordId id) const {
  auto it = row_by_id_.find(id);
  if (it == row_by_id_.end()) return std::nullopt;
  return it->second;
}

std::size_t Dataset::require_row(RecordId id) const {
  auto row = row_of(id);
  if (!row) throw ValidationError("unknown record id " + std::to_string(id));
  return *row;
}

// ---------------------------------------------------------------------------

CsvSchema CsvSchema::infer(std::span<const std::string> header) {
  CsvSchema schema;
  auto has = [&](const std::string& name) {
    return std::find(header.begin(), header.end(), name) != header.end();
  };
  if (has("date")) schema.date = "date";
  if (has("surface")) schema.surface = "surface";
  return schema;
}

std::vector<std::string> read_csv_header(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open dataset file '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("dataset file '" + path.string() + "' has no header");
  return split_csv_line(line);
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open dataset file '" + path.string() + "'");
  try {
    return parse_csv(in, schema);
  } catch (const RowError& e) {
    throw RowError(path.string() + ": " + e.what(), e.rows());
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

Dataset parse_csv(std::istream& in, const CsvSchema& schema) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_csv_line(line);

  const std::size_t id_col = column_index(header, schema.id);
  const std::size_t lat_col = column_index(header, schema.lat);
  const std::size_t lon_col = column_index(header, schema.lon);
  const std::size_t price_col = column_index(header, schema.price);
  std::optional<std::size_t> date_col, surface_col;
  if (schema.date) date_col = column_index(header, *schema.date);
  if (schema.surface) surface_col = column_index(header, *schema.surface);

  std::vector<std::string> feature_names = schema.features;
  if (feature_names.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c == id_col || c == lat_col || c == lon_col || c == price_col) continue;
      if ((date_col && c == *date_col) || (surface_col && c == *surface_col)) continue;
      feature_names.push_back(header[c]);
    }
  }
  std::vector<std::size_t> feature_cols;
  for (const auto& name : feature_names) feature_cols.push_back(column_index(header, name));

  std::vector<PropertyRecord> records;
  std::vector<std::size_t> bad_rows;
  std::ostringstream messages;
  std::unordered_set<RecordId> seen;
  std::size_t row = 0;
  constexpr std::size_t kMaxReported = 20;

  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    auto reject = [&](const std::string& msg) {
      if (bad_rows.size() < kMaxReported) messages << "\n  row " << row << ": " << msg;
      bad_rows.push_back(row);
    };
    if (cells.size() != header.size()) {
      reject("expected " + std::to_string(header.size()) + " fields, got " +
             std::to_string(cells.size()));
      continue;
    }
    PropertyRecord r;
    auto id = parse_id(cells[id_col]);
    auto lat = parse_double(cells[lat_col]);
    auto lon = parse_double(cells[lon_col]);
    auto price = parse_double(cells[price_col]);
    if (!id) { reject("field '" + schema.id + "' is not an integer id"); continue; }
    if (!lat || !lon) { reject("unparseable coordinates"); continue; }
    if (!price) { reject("field '" + schema.price + "' is not a number"); continue; }
    r.id = *id;
    r.lat = *lat;
    r.lon = *lon;
    r.price = *price;
    if (date_col && !cells[*date_col].empty()) {
      try {
        r.date = parse_iso_date(cells[*date_col]);
      } catch (const ValidationError& e) {
        reject(e.what());
        continue;
      }
    }
    if (surface_col && !cells[*surface_col].empty()) {
      auto s = parse_double(cells[*surface_col]);
      if (!s) { reject("field '" + *schema.surface + "' is not a number"); continue; }
      r.surface = *s;
    }
    bool features_ok = true;
    r.features.reserve(feature_cols.size());
    for (std::size_t j = 0; j < feature_cols.size(); ++j) {
      auto v = parse_double(cells[feature_cols[j]]);
      if (!v || std::isnan(*v)) {
        reject("feature '" + feature_names[j] + "' is missing or NaN");
        features_ok = false;
        break;
      }
      r.features.push_back(*v);
    }
    if (!features_ok) continue;
    try {
      validate_record(r, feature_cols.size());
    } catch (const ValidationError& e) {
      reject(e.what());
      continue;
    }
    if (!seen.insert(r.id).second) {
      reject("duplicate id " + std::to_string(r.id));
      continue;
    }
    records.push_back(std::move(r));
  }

  if (!bad_rows.empty()) {
    std::string what = std::to_string(bad_rows.size()) + " invalid row(s):" + messages.str();
    if (bad_rows.size() > kMaxReported) what += "\n  ...";
    throw RowError(what, std::move(bad_rows));
  }
  return Dataset(std::move(feature_names), std::move(records));
}

void write_csv(const Dataset& dataset, std::ostream& out) {
  const bool dated = dataset.all_dated();
  const bool surfaced = dataset.all_have_surface();
  out << "id,lat,lon";
  if (dated) out << ",date";
  if (surfaced) out << ",surface";
  out << ",price";
  for (const auto& name : dataset.feature_names()) out << ',' << name;
  out << '\n';
  for (const auto& r : dataset.records()) {
    out << r.id << ',' << format_double(r.lat) << ',' << format_double(r.lon);
    if (dated) out << ',' << format_iso_date(*r.date);
    if (surfaced) out << ',' << format_double(*r.surface);
    out << ',' << format_double(r.price);
    for (double f : r.features) out << ',' << format_double(f);
    out << '\n';
  }
}

void write_csv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write '" + path.string() + "'");
  write_csv(dataset, out);
}

// ---------------------------------------------------------------------------

std::string to_string(TargetKind kind) {
  return kind == TargetKind::log_price ? "log_price" : "log_price_per_sqm";
}

TargetKind target_kind_from_string(std::string_view text) {
  if (text == "log_price") return TargetKind::log_price;
  if (text == "log_price_per_sqm") return TargetKind::log_price_per_sqm;
  throw ValidationError("unknown target kind '" + std::string(text) + "'");
}

double TargetTransform::forward(double price, std::optional<double> surface) const {
  if (!(price > 0.0)) throw ValidationError("target transform requires a positive price");
  if (kind == TargetKind::log_price) return std::log(price) / scale;
  if (!surface) throw ValidationError("log_price_per_sqm target requires a surface");
  return std::log(price / *surface) / scale;
}

double TargetTransform::inverse(double value, std::optional<double> surface) const {
  if (kind == TargetKind::log_price) return std::exp(value * scale);
  if (!surface) throw ValidationError("log_price_per_sqm target requires a surface");
  return std::exp(value * scale) * *surface;
}

double target_value(const PropertyRecord& record, const TargetTransform& transform) {
  return transform.forward(record.price, record.surface);
}

double price_from_value(double value, const PropertyRecord& record,
                        const TargetTransform& transform) {
  return transform.inverse(value, record.surface);
}

TargetTransform fit_normalized_transform(const Dataset& dataset, std::span<const RecordId> ids,
                                         TargetKind kind) {
  if (ids.empty()) throw ValidationError("cannot normalize targets over an empty training set");
  TargetTransform unit{kind, 1.0};
  double sum = 0.0;
  for (RecordId id : ids) sum += target_value(dataset[dataset.require_row(id)], unit);
  const double mean = sum / static_cast<double>(ids.size());
  if (!(mean > 0.0)) {
    throw ValidationError("mean training log target is not positive; normalization undefined");
  }
  return {kind, mean};
}

nlohmann::json to_json(const TargetTransform& t) {
  return {{"kind", to_string(t.kind)}, {"scale", t.scale}};
}

TargetTransform transform_from_json(const nlohmann::json& j) {
  TargetTransform t;
  t.kind = target_kind_from_string(j.at("kind").get<std::string>());
  t.scale = j.at("scale").get<double>();
  if (!(t.scale > 0.0)) throw ValidationError("target scale must be positive");
  return t;
}

// ---------------------------------------------------------------------------

void ScalerParams::apply_into(std::span<const double> raw, std::span<double> out) const {
  if (raw.size() != mean.size() || out.size() != mean.size()) {
    throw ValidationError("scaler dimension mismatch");
  }
  for (std::size_t j = 0; j < raw.size(); ++j) out[j] = (raw[j] - mean[j]) / std[j];
}

std::vector<double> ScalerParams::apply(std::span<const double> raw) const {
  std::vector<double> out(raw.size());
  apply_into(raw, out);
  return out;
}

ScalerParams fit_scaler(const Dataset& dataset, std::span<const RecordId> train_ids) {
  if (train_ids.empty()) throw ValidationError("cannot fit scaler on an empty training set");
  const std::size_t f = dataset.feature_dim();
  const double n = static_cast<double>(train_ids.size());
  ScalerParams s;
  s.mean.assign(f, 0.0);
  s.std.assign(f, 0.0);
  std::vector<std::size_t> rows;
  rows.reserve(train_ids.size());
  for (RecordId id : train_ids) rows.push_back(dataset.require_row(id));

  for (std::size_t j = 0; j < f; ++j) {
    const double first = dataset[rows.front()].features[j];
    bool constant = true;
    double sum = 0.0;
    for (auto r : rows) {
      const double x = dataset[r].features[j];
      constant = constant && x == first;
      sum += x;
    }
    if (constant) {
      s.mean[j] = first;
      s.std[j] = ScalerParams::kStdFloor;
      continue;
    }
    const double mean = sum / n;
    double ss = 0.0;
    for (auto r : rows) {
      const double d = dataset[r].features[j] - mean;
      ss += d * d;
    }
    s.mean[j] = mean;
    s.std[j] = std::max(std::sqrt(ss / n), ScalerParams::kStdFloor);
  }
  return s;
}

nlohmann::json to_json(const ScalerParams& s) { return {{"mean", s.mean}, {"std", s.std}}; }

ScalerParams scaler_from_json(const nlohmann::json& j) {
  ScalerParams s;
  s.mean = j.at("mean").get<std::vector<double>>();
  s.std = j.at("std").get<std::vector<double>>();
  if (s.mean.size() != s.std.size()) throw ValidationError("scaler mean/std length mismatch");
  return s;
}

// ---------------------------------------------------------------------------

std::string to_string(SplitMode mode) { return mode == SplitMode::temporal ? "temporal" : "random"; }

SplitMode split_mode_from_string(std::string_view text) {
  if (text == "temporal") return SplitMode::temporal;
  if (text == "random") return SplitMode::random;
  throw ValidationError("unknown split mode '" + std::string(text) + "'");
}

std::vector<RecordId> SplitSpec::pool_ids() const {
  std::vector<RecordId> pool(offset_ids);
  pool.insert(pool.end(), train_ids.begin(), train_ids.end());
  return pool;
}

void SplitSpec::validate(const Dataset& dataset) const {
  std::unordered_set<RecordId> seen;
  for (const auto* part : {&offset_ids, &train_ids, &val_ids, &test_ids}) {
    for (RecordId id : *part) {
      dataset.require_row(id);
      if (!seen.insert(id).second) {
        throw ValidationError("split assigns id " + std::to_string(id) + " more than once");
      }
    }
  }
  if (seen.size() != dataset.size()) throw ValidationError("split does not cover the dataset");
  if (train_ids.empty()) throw ValidationError("split has an empty training partition");
  if (mode != SplitMode::temporal) return;
  if (!dataset.all_dated()) throw ValidationError("temporal split requires dated records");

  using Key = std::pair<DayNumber, RecordId>;
  auto key = [&](RecordId id) { return Key{*dataset[*dataset.row_of(id)].date, id}; };
  auto bounds = [&](const std::vector<RecordId>& ids) {
    Key lo = key(ids.front()), hi = lo;
    for (RecordId id : ids) {
      lo = std::min(lo, key(id));
      hi = std::max(hi, key(id));
    }
    return std::pair{lo, hi};
  };
  if (!offset_ids.empty() && !(bounds(offset_ids).second.first < bounds(train_ids).first.first)) {
    throw ValidationError("temporal split: offset pool overlaps the training period");
  }
  std::optional<Key> last;
  for (const auto* part : {&train_ids, &val_ids, &test_ids}) {
    if (part->empty()) continue;
    auto [lo, hi] = bounds(*part);
    if (last && !(*last < lo)) {
      throw ValidationError("temporal split partitions are not in chronological order");
    }
    last = hi;
  }
}

nlohmann::json to_json(const SplitSpec& s) {
  return {{"mode", to_string(s.mode)}, {"offset_years", s.offset_years},
          {"offset_ids", s.offset_ids}, {"train_ids", s.train_ids},
          {"val_ids", s.val_ids},       {"test_ids", s.test_ids}};
}

SplitSpec split_from_json(const nlohmann::json& j) {
  SplitSpec s;
  s.mode = split_mode_from_string(j.at("mode").get<std::string>());
  s.offset_years = j.value("offset_years", 0.0);
  s.offset_ids = j.at("offset_ids").get<std::vector<RecordId>>();
  s.train_ids = j.at("train_ids").get<std::vector<RecordId>>();
  s.val_ids = j.at("val_ids").get<std::vector<RecordId>>();
  s.test_ids = j.at("test_ids").get<std::vector<RecordId>>();
  return s;
}

DayNumber offset_days(double offset_years) {
  return static_cast<DayNumber>(std::llround(offset_years * 365.25));
}

SplitSpec temporal_split(const Dataset& dataset, double offset_years, double train_frac,
                         double val_frac) {
  if (!dataset.all_dated()) {
    throw ValidationError("temporal split is unsupported: some records have no date");
  }
  if (!(offset_years >= 0.0)) throw ValidationError("offset_years must be non-negative");
  check_fractions(train_frac, val_frac);

  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ra = dataset[a];
    const auto& rb = dataset[b];
    return std::pair{*ra.date, ra.id} < std::pair{*rb.date, rb.id};
  });

  SplitSpec s;
  s.mode = SplitMode::temporal;
  s.offset_years = offset_years;
  const DayNumber cutoff = *dataset[order.front()].date + offset_days(offset_years);
  std::size_t i = 0;
  for (; i < order.size() && *dataset[order[i]].date < cutoff; ++i) {
    s.offset_ids.push_back(dataset[order[i]].id);
  }
  const std::size_t m = order.size() - i;
  const std::size_t n_train = fraction_count(train_frac, m);
  const std::size_t n_val = fraction_count(val_frac, m);
  if (n_train == 0) {
    throw ValidationError("temporal split leaves no training records (offset consumes " +
                          std::to_string(s.offset_ids.size()) + " of " +
                          std::to_string(dataset.size()) + ")");
  }
  for (std::size_t k = 0; k < m; ++k, ++i) {
    const RecordId id = dataset[order[i]].id;
    if (k < n_train) s.train_ids.push_back(id);
    else if (k < n_train + n_val) s.val_ids.push_back(id);
    else s.test_ids.push_back(id);
  }
  return s;
}

SplitSpec random_split(const Dataset& dataset, std::uint64_t seed, double train_frac,
                       double val_frac) {
  check_fractions(train_frac, val_frac);
  std::vector<RecordId> ids;
  ids.reserve(dataset.size());
  for (const auto& r : dataset.records()) ids.push_back(r.id);
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);

  const std::size_t n = ids.size();
  const std::size_t n_train = fraction_count(train_frac, n);
  const std::size_t n_val = fraction_count(val_frac, n);
  SplitSpec s;
  s.mode = SplitMode::random;
  s.train_ids.assign(ids.begin(), ids.begin() + n_train);
  s.val_ids.assign(ids.begin() + n_train, ids.begin() + n_train + n_val);
  s.test_ids.assign(ids.begin() + n_train + n_val, ids.end());
  return s;
}

}  // namespace rea
