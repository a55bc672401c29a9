#include "dsetdist/core.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace dsetdist {

namespace {

std::string cell_name(Eigen::Index row, Eigen::Index col) {
  return "row " + std::to_string(row) + ", column " + std::to_string(col);
}

void validate_finite(const Matrix& data) {
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      if (!std::isfinite(data(i, j))) {
        throw ValidationError("non-finite value at " + cell_name(i, j));
      }
    }
  }
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(std::string_view(line).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

Dataset read_csv(std::istream& in, const std::string& name) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty CSV file", 1);
  const auto header = split_csv_line(line);
  const bool has_labels = header.back() == "label";
  const std::size_t n_features = header.size() - (has_labels ? 1 : 0);
  if (n_features == 0) throw ParseError("CSV header has no feature columns", 1);

  std::vector<double> values;
  Labels labels;
  std::size_t row = 1;
  std::size_t n_rows = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ParseError("row " + std::to_string(row) + ": expected " +
                           std::to_string(header.size()) + " fields, found " +
                           std::to_string(fields.size()),
                       row);
    }
    for (std::size_t j = 0; j < n_features; ++j) {
      double v = 0.0;
      if (!parse_number(fields[j], v)) {
        throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(j) +
                             ": cannot parse '" + fields[j] + "' as a number",
                         row);
      }
      if (!std::isfinite(v)) {
        throw ValidationError("non-finite value at row " + std::to_string(n_rows) +
                              ", column " + std::to_string(j) + " (file line " +
                              std::to_string(row) + ")");
      }
      values.push_back(v);
    }
    if (has_labels) {
      Label l = 0;
      if (!parse_number(fields.back(), l)) {
        throw ParseError("row " + std::to_string(row) + ": label '" + fields.back() +
                             "' is not an integer",
                         row);
      }
      labels.push_back(l);
    }
    ++n_rows;
  }
  if (n_rows == 0) throw ParseError("CSV file has no data rows", row);
  Matrix data = Eigen::Map<const Matrix>(values.data(), static_cast<Eigen::Index>(n_rows),
                                         static_cast<Eigen::Index>(n_features));
  return Dataset(std::move(data),
                 has_labels ? std::optional<Labels>(std::move(labels)) : std::nullopt, name);
}

void write_csv(std::ostream& out, const Dataset& ds) {
  for (Eigen::Index j = 0; j < ds.cols(); ++j) {
    if (j > 0) out << ',';
    out << 'f' << j;
  }
  if (ds.has_labels()) out << ",label";
  out << '\n';
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < ds.rows(); ++i) {
    for (Eigen::Index j = 0; j < ds.cols(); ++j) {
      if (j > 0) out << ',';
      out << ds.data()(i, j);
    }
    if (ds.has_labels()) out << ',' << (*ds.labels())[static_cast<std::size_t>(i)];
    out << '\n';
  }
}

template <typename T>
void put_le(std::string& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
  }
}

template <typename T>
T get_le(std::string_view in, std::size_t& pos) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
  if (pos + sizeof(T) > in.size()) {
    throw ParseError("DSD truncated at byte " + std::to_string(pos), pos);
  }
  U bits = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    bits |= static_cast<U>(static_cast<unsigned char>(in[pos + b])) << (8 * b);
  }
  pos += sizeof(T);
  return std::bit_cast<T>(bits);
}

}  // namespace

Dataset::Dataset(Matrix data, std::optional<Labels> labels, std::string name)
    : data_(std::move(data)), labels_(std::move(labels)), name_(std::move(name)) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw ValidationError("dataset '" + name_ + "' must have at least one row and one column");
  }
  validate_finite(data_);
  if (labels_ && static_cast<Eigen::Index>(labels_->size()) != data_.rows()) {
    throw ValidationError("dataset '" + name_ + "': " + std::to_string(labels_->size()) +
                          " labels for " + std::to_string(data_.rows()) + " rows");
  }
}

Labels Dataset::label_set() const {
  if (!labels_) return {};
  Labels out = *labels_;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Dataset Dataset::with_labels(std::optional<Labels> labels) const {
  return Dataset(data_, std::move(labels), name_);
}

Dataset Dataset::with_name(std::string name) const {
  return Dataset(data_, labels_, std::move(name));
}

Dataset Dataset::select_label(Label label) const {
  if (!labels_) throw ValidationError("dataset '" + name_ + "' has no labels");
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < labels_->size(); ++i) {
    if ((*labels_)[i] == label) rows.push_back(static_cast<Eigen::Index>(i));
  }
  if (rows.empty()) {
    throw InsufficientDataError("dataset '" + name_ + "' has no rows with label " +
                                std::to_string(label));
  }
  return select_rows(rows);
}

Dataset Dataset::select_rows(std::span<const Eigen::Index> rows) const {
  Matrix sub(static_cast<Eigen::Index>(rows.size()), data_.cols());
  std::optional<Labels> sub_labels;
  if (labels_) sub_labels.emplace();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    sub.row(static_cast<Eigen::Index>(i)) = data_.row(rows[i]);
    if (labels_) sub_labels->push_back((*labels_)[static_cast<std::size_t>(rows[i])]);
  }
  return Dataset(std::move(sub), std::move(sub_labels), name_);
}

DatasetGroup::DatasetGroup(std::vector<Dataset> datasets) : datasets_(std::move(datasets)) {
  if (datasets_.size() < 2) {
    throw ValidationError("a dataset group needs at least 2 datasets, got " +
                          std::to_string(datasets_.size()));
  }
  std::set<Label> vocab;
  for (const auto& ds : datasets_) {
    if (ds.cols() != datasets_.front().cols()) {
      throw ShapeError("dataset '" + ds.name() + "' has " + std::to_string(ds.cols()) +
                       " features, expected " + std::to_string(datasets_.front().cols()));
    }
    for (Label l : ds.label_set()) vocab.insert(l);
  }
  vocabulary_.assign(vocab.begin(), vocab.end());
}

Eigen::Index DatasetGroup::total_rows() const noexcept {
  Eigen::Index n = 0;
  for (const auto& ds : datasets_) n += ds.rows();
  return n;
}

bool DatasetGroup::all_labeled() const noexcept {
  return std::all_of(datasets_.begin(), datasets_.end(),
                     [](const Dataset& d) { return d.has_labels(); });
}

Matrix DatasetGroup::pooled() const {
  Matrix out(total_rows(), cols());
  Eigen::Index r = 0;
  for (const auto& ds : datasets_) {
    out.middleRows(r, ds.rows()) = ds.data();
    r += ds.rows();
  }
  return out;
}

std::vector<Eigen::Index> DatasetGroup::offsets() const {
  std::vector<Eigen::Index> out{0};
  for (const auto& ds : datasets_) out.push_back(out.back() + ds.rows());
  return out;
}

void require_same_cols(const Dataset& a, const Dataset& b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("datasets are not comparable: " + std::to_string(a.cols()) + " vs " +
                     std::to_string(b.cols()) + " features");
  }
}

FileFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".csv") return FileFormat::csv;
  if (ext == ".dsd") return FileFormat::dsd;
  throw Error("cannot infer dataset format from '" + path.string() +
              "' (expected .csv or .dsd)");
}

std::string encode_dsd(const Dataset& dataset) {
  std::string out = "DSD1";
  out.reserve(13 + static_cast<std::size_t>(dataset.rows() * dataset.cols()) * 8 +
              (dataset.has_labels() ? static_cast<std::size_t>(dataset.rows()) * 8 : 0));
  put_le(out, static_cast<std::uint32_t>(dataset.rows()));
  put_le(out, static_cast<std::uint32_t>(dataset.cols()));
  put_le(out, static_cast<std::uint8_t>(dataset.has_labels() ? 1 : 0));
  const Matrix& m = dataset.data();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) put_le(out, m(i, j));
  }
  if (dataset.has_labels()) {
    for (Label l : *dataset.labels()) put_le(out, l);
  }
  return out;
}

Dataset decode_dsd(std::string_view bytes, std::string name) {
  if (bytes.size() < 4 || bytes.substr(0, 4) != "DSD1") throw ParseError("missing DSD1 magic", 0);
  std::size_t pos = 4;
  const auto rows = get_le<std::uint32_t>(bytes, pos);
  const auto cols = get_le<std::uint32_t>(bytes, pos);
  const auto flag = get_le<std::uint8_t>(bytes, pos);
  if (flag > 1) throw ParseError("has_labels byte must be 0 or 1", pos - 1);
  const std::size_t expected = 13 + static_cast<std::size_t>(rows) * cols * 8 +
                               (flag ? static_cast<std::size_t>(rows) * 8 : 0);
  if (bytes.size() != expected) {
    throw ParseError("DSD size mismatch: header implies " + std::to_string(expected) +
                         " bytes, file has " + std::to_string(bytes.size()),
                     std::min(bytes.size(), expected));
  }
  Matrix data(rows, cols);
  for (std::uint32_t i = 0; i < rows; ++i) {
    for (std::uint32_t j = 0; j < cols; ++j) {
      const std::size_t at = pos;
      const double v = get_le<double>(bytes, pos);
      if (!std::isfinite(v)) {
        throw ValidationError("non-finite value at " + cell_name(i, j) + " (byte " +
                              std::to_string(at) + ")");
      }
      data(i, j) = v;
    }
  }
  std::optional<Labels> labels;
  if (flag) {
    labels.emplace(rows);
    for (std::uint32_t i = 0; i < rows; ++i) (*labels)[i] = get_le<Label>(bytes, pos);
  }
  return Dataset(std::move(data), std::move(labels), std::move(name));
}

Dataset load_dataset(const std::filesystem::path& path, FileFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  const std::string name = path.stem().string();
  if (format == FileFormat::csv) return read_csv(in, name);
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_dsd(buf.str(), name);
}

Dataset load_dataset(const std::filesystem::path& path) {
  return load_dataset(path, format_from_path(path));
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path, FileFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  if (format == FileFormat::csv) {
    write_csv(out, dataset);
  } else {
    const auto bytes = encode_dsd(dataset);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  save_dataset(dataset, path, format_from_path(path));
}

DatasetGroup standardize(const DatasetGroup& group) {
  const Matrix pooled = group.pooled();
  const double n = static_cast<double>(pooled.rows());
  const Eigen::RowVectorXd mean = pooled.colwise().mean();
  Eigen::RowVectorXd scale(pooled.cols());
  for (Eigen::Index j = 0; j < pooled.cols(); ++j) {
    const double var = (pooled.col(j).array() - mean(j)).square().sum() / n;
    const double sd = std::sqrt(var);
    scale(j) = sd < 1e-12 ? 1.0 : sd;
  }
  std::vector<Dataset> out;
  out.reserve(group.size());
  for (const auto& ds : group.datasets()) {
    Matrix z = (ds.data().rowwise() - mean).array().rowwise() / scale.array();
    out.emplace_back(std::move(z), ds.labels(), ds.name());
  }
  return DatasetGroup(std::move(out));
}

Dataset complex_to_real(const Matrix& real, const Matrix& imag, std::string name) {
  if (real.rows() != imag.rows() || real.cols() != imag.cols()) {
    throw ShapeError("real part is " + std::to_string(real.rows()) + "x" +
                     std::to_string(real.cols()) + " but imaginary part is " +
                     std::to_string(imag.rows()) + "x" + std::to_string(imag.cols()));
  }
  Matrix out(real.rows(), 2 * real.cols());
  out.leftCols(real.cols()) = real;
  out.rightCols(imag.cols()) = imag;
  return Dataset(std::move(out), std::nullopt, std::move(name));
}

bool canonical_less(const Dataset& a, const Dataset& b) noexcept {
  if (a.rows() != b.rows()) return a.rows() < b.rows();
  if (a.cols() != b.cols()) return a.cols() < b.cols();
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  return std::lexicographical_compare(pa, pa + a.data().size(), pb, pb + b.data().size());
}

}  // namespace dsetdist
