#include "iwmc/data.hpp"

#include "iwmc/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace iwmc {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_real(std::string_view s) {
    if (s.starts_with('+')) s.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

Index resolve_column(const csv::Row& header, const ColumnSelector& selector) {
    if (const auto* name = std::get_if<std::string>(&selector)) {
        const auto it = std::find(header.begin(), header.end(), *name);
        if (it == header.end()) throw DataError("label column '" + *name + "' not found in header");
        return static_cast<Index>(it - header.begin());
    }
    const Index idx = std::get<Index>(selector);
    if (idx < 0 || idx >= static_cast<Index>(header.size()))
        throw DataError("label column index " + std::to_string(idx) + " out of range");
    return idx;
}

}  // namespace

IncompleteMatrix::IncompleteMatrix(Matrix values, Mask observed)
    : values_(std::move(values)), mask_(std::move(observed)) {
    if (values_.rows() != mask_.rows() || values_.cols() != mask_.cols())
        throw DataError("observed mask shape does not match values shape");
    for (Index q = 0; q < values_.cols(); ++q) {
        Index column_observed = 0;
        for (Index p = 0; p < values_.rows(); ++p) {
            if (mask_(p, q)) {
                if (!std::isfinite(values_(p, q)))
                    throw DataError("non-finite observed value at (" + std::to_string(p) + ", " +
                                    std::to_string(q) + ")");
                ++column_observed;
            } else {
                values_(p, q) = 0.0;
            }
        }
        if (column_observed == 0) throw DataError("fully missing column " + std::to_string(q));
        observed_count_ += column_observed;
    }
}

IncompleteMatrix IncompleteMatrix::fully_observed(Matrix values) {
    Mask mask = Mask::Constant(values.rows(), values.cols(), true);
    return IncompleteMatrix(std::move(values), std::move(mask));
}

double IncompleteMatrix::at(Index p, Index q) const {
    if (!mask_(p, q))
        throw DataError("read of missing cell (" + std::to_string(p) + ", " + std::to_string(q) + ")");
    return values_(p, q);
}

double IncompleteMatrix::missing_rate() const {
    return values_.size() == 0 ? 0.0
                               : static_cast<double>(missing_count()) / static_cast<double>(values_.size());
}

Vector IncompleteMatrix::observed_column_means() const {
    Vector means(cols());
    for (Index q = 0; q < cols(); ++q) {
        double sum = 0.0;
        Index count = 0;
        for (Index p = 0; p < rows(); ++p) {
            if (mask_(p, q)) {
                sum += values_(p, q);
                ++count;
            }
        }
        means(q) = sum / static_cast<double>(count);
    }
    return means;
}

IncompleteMatrix IncompleteMatrix::select_rows(const std::vector<Index>& rows) const {
    Matrix v(static_cast<Index>(rows.size()), cols());
    Mask m(static_cast<Index>(rows.size()), cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        v.row(static_cast<Index>(i)) = values_.row(rows[i]);
        m.row(static_cast<Index>(i)) = mask_.row(rows[i]);
    }
    return IncompleteMatrix(std::move(v), std::move(m));
}

bool operator==(const IncompleteMatrix& a, const IncompleteMatrix& b) {
    return a.values_.rows() == b.values_.rows() && a.values_.cols() == b.values_.cols() &&
           a.mask_ == b.mask_ && a.values_ == b.values_;
}

FeatureWeights::FeatureWeights(Vector w) : w_(std::move(w)) {
    for (Index l = 0; l < w_.size(); ++l) {
        if (!std::isfinite(w_(l)) || w_(l) < 0.0)
            throw DataError("feature weight " + std::to_string(l) + " is negative or non-finite");
    }
}

void LabeledDataset::validate() const {
    if (static_cast<Index>(y.size()) != X.rows())
        throw DataError("label count " + std::to_string(y.size()) + " does not match row count " +
                        std::to_string(X.rows()));
    if (std::any_of(y.begin(), y.end(), [](int c) { return c < 0; }))
        throw DataError("labels must be nonnegative");
    if (relevant_features) {
        for (Index f : *relevant_features) {
            if (f < 0 || f >= X.cols()) throw DataError("relevant feature index out of range");
        }
    }
}

int LabeledDataset::class_count() const {
    return static_cast<int>(std::set<int>(y.begin(), y.end()).size());
}

void LabeledDataset::require_supervised() const {
    validate();
    if (class_count() < 2) throw DataError("degenerate label set: at least two classes are required");
}

StandardizationParams standardize_fit(const IncompleteMatrix& X) {
    StandardizationParams params{X.observed_column_means(), Vector(X.cols())};
    for (Index q = 0; q < X.cols(); ++q) {
        double ss = 0.0;
        Index count = 0;
        for (Index p = 0; p < X.rows(); ++p) {
            if (X.observed(p, q)) {
                const double d = X.values()(p, q) - params.means(q);
                ss += d * d;
                ++count;
            }
        }
        const double sd = std::sqrt(ss / static_cast<double>(count));
        params.stds(q) = sd > 0.0 ? sd : 1.0;
    }
    return params;
}

IncompleteMatrix standardize_apply(const IncompleteMatrix& X, const StandardizationParams& params) {
    if (params.means.size() != X.cols() || params.stds.size() != X.cols())
        throw DataError("standardization parameters do not match column count");
    Matrix z = X.values();
    for (Index q = 0; q < X.cols(); ++q) {
        for (Index p = 0; p < X.rows(); ++p) {
            if (X.observed(p, q)) z(p, q) = (z(p, q) - params.means(q)) / params.stds(q);
        }
    }
    return IncompleteMatrix(std::move(z), X.mask());
}

Matrix standardize_invert(const Matrix& Z, const StandardizationParams& params) {
    if (params.means.size() != Z.cols() || params.stds.size() != Z.cols())
        throw DataError("standardization parameters do not match column count");
    Matrix x(Z.rows(), Z.cols());
    for (Index q = 0; q < Z.cols(); ++q) x.col(q) = Z.col(q).array() * params.stds(q) + params.means(q);
    return x;
}

Matrix compose_xhat(const IncompleteMatrix& X, const Matrix& GH) {
    if (GH.rows() != X.rows() || GH.cols() != X.cols())
        throw DataError("compose_xhat: reconstruction shape does not match data shape");
    return X.mask().select(X.values(), GH);
}

const std::set<std::string>& default_missing_tokens() {
    static const std::set<std::string> tokens{"", "NA", "?", "NaN"};
    return tokens;
}

CsvDataset read_csv_table(const std::filesystem::path& path,
                          const std::optional<ColumnSelector>& label_column,
                          const std::set<std::string>& missing_tokens) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    auto rows = csv::parse(buffer.str());
    if (!rows.empty() && rows.front().size() > 1) {
        // blank lines cannot be records of a multi-column file
        std::erase_if(rows, [](const csv::Row& r) { return r.size() == 1 && r.front().empty(); });
    }
    if (rows.empty()) throw DataError("csv file " + path.string() + " has no header row");

    const csv::Row& header = rows.front();
    const Index n_fields = static_cast<Index>(header.size());
    const std::optional<Index> label_idx =
        label_column ? std::optional<Index>(resolve_column(header, *label_column)) : std::nullopt;

    const Index n = static_cast<Index>(rows.size()) - 1;
    const Index m = n_fields - (label_idx ? 1 : 0);
    if (m < 1) throw DataError("csv file has no feature columns");

    std::vector<std::string> feature_names;
    for (Index f = 0; f < n_fields; ++f) {
        if (f != label_idx) feature_names.push_back(header[f]);
    }

    Matrix values = Matrix::Zero(n, m);
    Mask mask = Mask::Constant(n, m, false);
    Labels labels;
    std::vector<std::string> class_names;
    std::map<std::string, int> class_codes;

    for (Index p = 0; p < n; ++p) {
        const csv::Row& row = rows[p + 1];
        if (static_cast<Index>(row.size()) != n_fields)
            throw DataError("row " + std::to_string(p + 2) + " has " + std::to_string(row.size()) +
                            " fields, expected " + std::to_string(n_fields));
        Index q = 0;
        for (Index f = 0; f < n_fields; ++f) {
            const std::string_view cell = trim(row[f]);
            if (f == label_idx) {
                if (missing_tokens.contains(std::string(cell)))
                    throw DataError("missing label value in row " + std::to_string(p + 2));
                auto [it, inserted] = class_codes.emplace(std::string(cell), static_cast<int>(class_names.size()));
                if (inserted) class_names.emplace_back(cell);
                labels.push_back(it->second);
                continue;
            }
            if (!missing_tokens.contains(std::string(cell))) {
                const auto value = parse_real(cell);
                if (!value)
                    throw DataError("unparseable cell '" + std::string(cell) + "' in row " +
                                    std::to_string(p + 2) + ", column '" + header[f] + "'");
                values(p, q) = *value;
                mask(p, q) = true;
            }
            ++q;
        }
    }
    for (Index q = 0; q < m; ++q) {
        if (!mask.col(q).any()) throw DataError("fully missing column '" + feature_names[q] + "'");
    }

    CsvDataset out{IncompleteMatrix(std::move(values), std::move(mask)), std::move(feature_names),
                   std::nullopt, std::move(class_names)};
    if (label_idx) out.labels = std::move(labels);
    return out;
}

LabeledDataset read_csv(const std::filesystem::path& path, const ColumnSelector& label_column,
                        const std::set<std::string>& missing_tokens) {
    CsvDataset table = read_csv_table(path, label_column, missing_tokens);
    LabeledDataset ds{std::move(table.X), std::move(*table.labels), std::nullopt,
                      std::move(table.feature_names), std::move(table.class_names)};
    ds.validate();
    return ds;
}

void write_csv(const std::filesystem::path& path, const IncompleteMatrix& X,
               const std::vector<std::string>& feature_names,
               const std::optional<std::vector<std::string>>& labels, const std::string& label_name) {
    if (static_cast<Index>(feature_names.size()) != X.cols())
        throw DataError("write_csv: feature name count does not match column count");
    if (labels && static_cast<Index>(labels->size()) != X.rows())
        throw DataError("write_csv: label count does not match row count");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file " + path.string());

    csv::Row header = feature_names;
    if (labels) header.push_back(label_name);
    csv::write_row(out, header);
    csv::Row row;
    for (Index p = 0; p < X.rows(); ++p) {
        row.clear();
        for (Index q = 0; q < X.cols(); ++q)
            row.push_back(X.observed(p, q) ? csv::format_double(X.values()(p, q)) : std::string());
        if (labels) row.push_back((*labels)[p]);
        csv::write_row(out, row);
    }
    if (!out) throw DataError("failed writing " + path.string());
}

}  // namespace iwmc
