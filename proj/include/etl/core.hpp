#pragma once

// core.hpp
//
// Embedding and trace value types shared by every other header.
// An Embedding is either a flat vector or a patch set (n equal-length
// rows); a Trace is an ordered sequence of embeddings of uniform shape.
// Both are immutable after construction and safe to share across threads.

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace etl {

// Error categories used across the toolkit. Every throwing operation
// documents which of these it can raise.
enum class Errc {
  dimension_mismatch,
  non_finite_entry,
  index_out_of_range,
  negative_threshold,
  zero_vector,
  empty_set,
  incompatible_metric,
  unresolved_identifier,
  parse_error,
  io_error,
  schema_error,
  window_too_large,
  formula_too_deep,
  invalid_dimension,
  insufficient_history,
  action_out_of_bounds,
  config_error,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::dimension_mismatch: return "dimension-mismatch";
    case Errc::non_finite_entry: return "non-finite-entry";
    case Errc::index_out_of_range: return "index-out-of-range";
    case Errc::negative_threshold: return "negative-threshold";
    case Errc::zero_vector: return "zero-vector";
    case Errc::empty_set: return "empty-set";
    case Errc::incompatible_metric: return "incompatible-metric";
    case Errc::unresolved_identifier: return "unresolved-identifier";
    case Errc::parse_error: return "parse-error";
    case Errc::io_error: return "io-error";
    case Errc::schema_error: return "schema-error";
    case Errc::window_too_large: return "window-too-large";
    case Errc::formula_too_deep: return "formula-too-deep";
    case Errc::invalid_dimension: return "invalid-dimension";
    case Errc::insufficient_history: return "insufficient-history";
    case Errc::action_out_of_bounds: return "action-out-of-bounds";
    case Errc::config_error: return "config-error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const { return code_; }

 protected:
  // For subclasses that own their message format (parse errors print
  // as "line:col: message").
  struct Preformatted {};
  Error(Errc code, const std::string& what, Preformatted)
      : std::runtime_error(what), code_(code) {}

 private:
  Errc code_;
};

enum class Kind { vector, patch_set };

inline const char* kind_name(Kind k) {
  return k == Kind::vector ? "vector" : "patch_set";
}

// Dense embedding. Vector embeddings are stored as a single row;
// patch sets as n rows of d entries each, row-major.
class Embedding {
 public:
  /// Vector embedding of dimension data.size().
  static Embedding vector(std::vector<double> data) {
    const std::size_t d = data.size();
    return Embedding(Kind::vector, 1, d, std::move(data));
  }

  /// Patch-set embedding; every row must have the same length.
  static Embedding patch_set(const std::vector<std::vector<double>>& rows) {
    if (rows.empty())
      throw Error(Errc::empty_set, "patch set needs at least one patch");
    const std::size_t d = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * d);
    for (const auto& row : rows) {
      if (row.size() != d)
        throw Error(Errc::dimension_mismatch,
                    "ragged patch set: expected dimension " +
                        std::to_string(d) + ", got " +
                        std::to_string(row.size()));
      flat.insert(flat.end(), row.begin(), row.end());
    }
    return Embedding(Kind::patch_set, rows.size(), d, std::move(flat));
  }

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  std::size_t patch_count() const { return patches_; }

  /// All entries, row-major. For vectors this is the vector itself.
  std::span<const double> flat() const { return data_; }

  std::span<const double> patch(std::size_t i) const {
    if (i >= patches_)
      throw Error(Errc::index_out_of_range,
                  "patch " + std::to_string(i) + " of " +
                      std::to_string(patches_));
    return std::span<const double>(data_).subspan(i * dim_, dim_);
  }

  bool same_shape(const Embedding& other) const {
    return kind_ == other.kind_ && patches_ == other.patches_ &&
           dim_ == other.dim_;
  }

  friend bool operator==(const Embedding& a, const Embedding& b) {
    return a.kind_ == b.kind_ && a.patches_ == b.patches_ &&
           a.dim_ == b.dim_ && a.data_ == b.data_;
  }

 private:
  Embedding(Kind kind, std::size_t patches, std::size_t dim,
            std::vector<double> data)
      : kind_(kind), patches_(patches), dim_(dim), data_(std::move(data)) {
    if (dim_ < 1)
      throw Error(Errc::dimension_mismatch, "embedding dimension must be >= 1");
    for (double v : data_) {
      if (!std::isfinite(v))
        throw Error(Errc::non_finite_entry, "embedding entry is not finite");
    }
  }

  Kind kind_;
  std::size_t patches_;  // 1 for vector embeddings
  std::size_t dim_;
  std::vector<double> data_;
};

/// Builds a validated embedding from rectangular row data. Vector kind
/// requires exactly one row.
inline Embedding make_embedding(Kind kind,
                                const std::vector<std::vector<double>>& data) {
  if (data.empty())
    throw Error(Errc::empty_set, "embedding data must be non-empty");
  if (kind == Kind::vector) {
    if (data.size() != 1)
      throw Error(Errc::dimension_mismatch,
                  "vector embedding takes a single row, got " +
                      std::to_string(data.size()));
    return Embedding::vector(data.front());
  }
  return Embedding::patch_set(data);
}

// Ordered sequence of embeddings of identical shape. May be empty; the
// semantics layer requires length >= 1 via ScoreContext.
class Trace {
 public:
  Trace() = default;

  explicit Trace(std::vector<Embedding> items) : items_(std::move(items)) {
    for (std::size_t i = 1; i < items_.size(); ++i) {
      if (!items_[i].same_shape(items_.front()))
        throw Error(Errc::dimension_mismatch,
                    "trace item " + std::to_string(i) +
                        " does not match the shape of item 0");
    }
  }

  Trace(std::initializer_list<Embedding> items)
      : Trace(std::vector<Embedding>(items)) {}

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

  const Embedding& operator[](std::size_t i) const { return items_[i]; }

  const Embedding& at(std::size_t i) const {
    if (i >= items_.size())
      throw Error(Errc::index_out_of_range,
                  "trace index " + std::to_string(i) + " of " +
                      std::to_string(items_.size()));
    return items_[i];
  }

  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  void push_back(Embedding e) {
    if (!items_.empty() && !e.same_shape(items_.front()))
      throw Error(Errc::dimension_mismatch,
                  "appended embedding does not match trace shape");
    items_.push_back(std::move(e));
  }

  friend bool operator==(const Trace& a, const Trace& b) {
    return a.items_ == b.items_;
  }

 private:
  std::vector<Embedding> items_;
};

/// Items i..t inclusive, the window used by bounded semantics.
inline Trace trace_slice(const Trace& trace, std::size_t i, std::size_t t) {
  if (i > t || t >= trace.size())
    throw Error(Errc::index_out_of_range,
                "slice [" + std::to_string(i) + ", " + std::to_string(t) +
                    "] of trace length " + std::to_string(trace.size()));
  std::vector<Embedding> items;
  items.reserve(t - i + 1);
  for (std::size_t k = i; k <= t; ++k) items.push_back(trace[k]);
  return Trace(std::move(items));
}

}  // namespace etl
