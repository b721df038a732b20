#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace iwmc {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;
using Labels = std::vector<int>;

/// Raised when an input violates a documented precondition.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an iterative solver produces non-finite values.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A dense matrix together with its set of observed cells.
///
/// The stored values are the projection onto the observed set: every
/// missing cell holds exactly 0. Algorithms consume (values, mask) pairs and
/// never rely on sentinels. Every column must have at least one observed
/// entry; the constructor enforces this.
class IncompleteMatrix {
public:
    IncompleteMatrix(Matrix values, Mask observed);

    /// A matrix with every cell observed.
    static IncompleteMatrix fully_observed(Matrix values);

    Index rows() const { return values_.rows(); }
    Index cols() const { return values_.cols(); }

    bool observed(Index p, Index q) const { return mask_(p, q); }
    /// Observed value at (p, q); throws DataError if the cell is missing.
    double at(Index p, Index q) const;

    /// Values with missing cells set to 0.
    const Matrix& values() const { return values_; }
    const Mask& mask() const { return mask_; }

    Index observed_count() const { return observed_count_; }
    Index missing_count() const { return values_.size() - observed_count_; }
    bool is_complete() const { return missing_count() == 0; }
    double missing_rate() const;

    /// Observed-cell mean per column.
    Vector observed_column_means() const;

    /// Rows selected by index, in the given order. Throws DataError if a
    /// column ends up with no observed entry.
    IncompleteMatrix select_rows(const std::vector<Index>& rows) const;

    friend bool operator==(const IncompleteMatrix& a, const IncompleteMatrix& b);

private:
    Matrix values_;
    Mask mask_;
    Index observed_count_ = 0;
};

/// Nonnegative, finite per-feature weights.
class FeatureWeights {
public:
    explicit FeatureWeights(Vector w);
    static FeatureWeights ones(Index m) { return FeatureWeights(Vector::Ones(m)); }

    Index size() const { return w_.size(); }
    double operator[](Index l) const { return w_(l); }
    const Vector& values() const { return w_; }
    /// Squared Euclidean norm, the outer-loop convergence statistic.
    double squared_norm() const { return w_.squaredNorm(); }

private:
    Vector w_;
};

struct LabeledDataset {
    IncompleteMatrix X;
    Labels y;
    std::optional<std::vector<Index>> relevant_features;
    std::vector<std::string> feature_names;
    /// class_names[c] is the original label string of code c.
    std::vector<std::string> class_names;

    /// Checks len(y) = rows and nonnegative labels.
    void validate() const;
    /// Number of distinct label codes present.
    int class_count() const;
    /// Throws DataError unless at least two classes are present.
    void require_supervised() const;
};

struct StandardizationParams {
    Vector means;
    Vector stds;
};

/// Per-column observed mean and population std; a zero std becomes 1.
StandardizationParams standardize_fit(const IncompleteMatrix& X);
IncompleteMatrix standardize_apply(const IncompleteMatrix& X, const StandardizationParams& params);
/// x * std + mean applied to every cell of a dense matrix.
Matrix standardize_invert(const Matrix& Z, const StandardizationParams& params);

/// P_Omega(X) + P_complement(GH): observed cells from X, the rest from GH.
Matrix compose_xhat(const IncompleteMatrix& X, const Matrix& GH);

/// Selects the label column of a CSV file by header name or zero-based index.
using ColumnSelector = std::variant<std::string, Index>;

const std::set<std::string>& default_missing_tokens();

/// Raw numeric table read from CSV. `labels` is present only when a label
/// column was requested.
struct CsvDataset {
    IncompleteMatrix X;
    std::vector<std::string> feature_names;
    std::optional<Labels> labels;
    std::vector<std::string> class_names;
};

/// Parses a CSV file with a header row. Label strings are mapped to dense
/// integer codes in order of first appearance.
LabeledDataset read_csv(const std::filesystem::path& path, const ColumnSelector& label_column,
                        const std::set<std::string>& missing_tokens = default_missing_tokens());

/// Like read_csv, but the label column is optional. With `label_column`
/// unset, every column is a feature.
CsvDataset read_csv_table(const std::filesystem::path& path,
                          const std::optional<ColumnSelector>& label_column,
                          const std::set<std::string>& missing_tokens = default_missing_tokens());

/// Writes features (missing cells as empty fields) and, when given, labels
/// in a trailing column named `label_name`.
void write_csv(const std::filesystem::path& path, const IncompleteMatrix& X,
               const std::vector<std::string>& feature_names,
               const std::optional<std::vector<std::string>>& labels,
               const std::string& label_name = "label");

}  // namespace iwmc
