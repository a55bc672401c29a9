#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dsetdist {

/// Row-major dense matrix; one row per datapoint.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Label = std::int64_t;
using Labels = std::vector<Label>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. `offset` is a 1-based row for CSV and a byte offset for DSD.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Raised when an operation needs more points (or rank) than a dataset has.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// An M x N matrix of finite real features with optional per-row integer labels.
/// Immutable after construction.
class Dataset {
 public:
  Dataset(Matrix data, std::optional<Labels> labels = std::nullopt,
          std::string name = {});

  const Matrix& data() const noexcept { return data_; }
  const std::optional<Labels>& labels() const noexcept { return labels_; }
  bool has_labels() const noexcept { return labels_.has_value(); }
  const std::string& name() const noexcept { return name_; }

  Eigen::Index rows() const noexcept { return data_.rows(); }
  Eigen::Index cols() const noexcept { return data_.cols(); }

  /// Sorted distinct labels; empty when unlabeled.
  Labels label_set() const;

  Dataset with_labels(std::optional<Labels> labels) const;
  Dataset with_name(std::string name) const;
  /// Rows carrying `label`, in original order. Requires labels.
  Dataset select_label(Label label) const;
  Dataset select_rows(std::span<const Eigen::Index> rows) const;

 private:
  Matrix data_;
  std::optional<Labels> labels_;
  std::string name_;
};

/// K >= 2 datasets sharing a feature count, plus the union of their label sets.
class DatasetGroup {
 public:
  explicit DatasetGroup(std::vector<Dataset> datasets);

  const std::vector<Dataset>& datasets() const noexcept { return datasets_; }
  const Dataset& operator[](std::size_t i) const { return datasets_.at(i); }
  std::size_t size() const noexcept { return datasets_.size(); }
  Eigen::Index cols() const noexcept { return datasets_.front().cols(); }
  Eigen::Index total_rows() const noexcept;
  bool all_labeled() const noexcept;

  /// Union of member label sets, sorted ascending.
  const Labels& label_vocabulary() const noexcept { return vocabulary_; }

  /// All rows stacked in dataset order.
  Matrix pooled() const;
  /// Row offsets into `pooled()`; size() + 1 entries.
  std::vector<Eigen::Index> offsets() const;

 private:
  std::vector<Dataset> datasets_;
  Labels vocabulary_;
};

void require_same_cols(const Dataset& a, const Dataset& b);

enum class FileFormat { csv, dsd };

/// Picks the format from the extension (".csv" or ".dsd").
FileFormat format_from_path(const std::filesystem::path& path);

Dataset load_dataset(const std::filesystem::path& path, FileFormat format);
Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path,
                  FileFormat format);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

/// DSD byte image: "DSD1", u32 rows, u32 cols, u8 has_labels, f64 data, i64 labels.
std::string encode_dsd(const Dataset& dataset);
Dataset decode_dsd(std::string_view bytes, std::string name = {});

/// Pooled z-scoring: every column uses the mean and standard deviation of all
/// member rows together. Columns with pooled std < 1e-12 are only centered.
DatasetGroup standardize(const DatasetGroup& group);

/// [re_0 .. re_{P-1}, im_0 .. im_{P-1}] per row.
Dataset complex_to_real(const Matrix& real, const Matrix& imag, std::string name = {});

/// Orders two datasets canonically (shape, then lexicographic values) so that
/// order-dependent floating-point reductions give identical results under swap.
bool canonical_less(const Dataset& a, const Dataset& b) noexcept;

}  // namespace dsetdist
