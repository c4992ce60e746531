#ifndef BRIDGED_TYPES_HPP
#define BRIDGED_TYPES_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace bridged {

/// Row-major so that each point is a contiguous row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Labels = std::vector<int>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file or record.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Rows or vectors whose dimensions disagree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A precondition on an argument was violated.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Non-finite values where finite ones are required.
class NumericError : public Error {
public:
    using Error::Error;
};

/// A data split cannot satisfy the requested supervision.
class SplitError : public Error {
public:
    using Error::Error;
};

/// Evaluation needs information that is not available (e.g. latent labels).
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// Master seed for every stochastic operation. Same seed, same bits.
struct RngSeed {
    std::uint64_t value = 0;

    friend bool operator==(RngSeed, RngSeed) = default;
};

/// An indexed collection of d-dimensional points with optional latent
/// class labels. Latents are carried for evaluation only; no fitting
/// routine reads them.
class PointSet {
public:
    PointSet() = default;

    /// Ids default to the row index when `ids` is empty.
    explicit PointSet(Matrix points, std::vector<std::string> ids = {},
                      std::optional<Labels> latent = std::nullopt);

    std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
    int dim() const { return static_cast<int>(points_.cols()); }
    bool empty() const { return points_.rows() == 0; }

    const Matrix& points() const { return points_; }
    auto row(std::size_t i) const { return points_.row(static_cast<Eigen::Index>(i)); }

    const std::vector<std::string>& ids() const { return ids_; }
    const std::string& id(std::size_t i) const { return ids_[i]; }
    std::optional<std::size_t> find(const std::string& id) const;

    bool has_latent() const { return latent_.has_value(); }
    /// Throws EvaluationError when the set carries no latent labels.
    const Labels& latent() const;
    /// Largest latent label + 1, or 0 without latents.
    int latent_classes() const;
    /// Throws ArgumentError unless every latent label is in [0, classes).
    void check_latent_range(int classes) const;

    PointSet subset(std::span<const std::size_t> rows) const;
    /// Rows of `a` followed by rows of `b`; ids must stay unique.
    static PointSet concat(const PointSet& a, const PointSet& b);

private:
    Matrix points_;
    std::vector<std::string> ids_;
    std::optional<Labels> latent_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// The k supervised pairs. Row i of `x` and row i of `y` are one sample.
class PairedSet {
public:
    PairedSet() = default;
    PairedSet(Matrix x, Matrix y, std::vector<std::string> ids = {},
              std::optional<Labels> latent = std::nullopt);

    std::size_t size() const { return static_cast<std::size_t>(x_.rows()); }
    bool empty() const { return x_.rows() == 0; }
    int x_dim() const { return static_cast<int>(x_.cols()); }
    int y_dim() const { return static_cast<int>(y_.cols()); }

    const Matrix& x() const { return x_; }
    const Matrix& y() const { return y_; }
    const std::vector<std::string>& ids() const { return ids_; }
    bool has_latent() const { return latent_.has_value(); }
    const Labels& latent() const;

    PointSet x_points() const;
    PointSet y_points() const;
    /// The same pairs with the roles of x and y exchanged.
    PairedSet swapped() const;

private:
    Matrix x_;
    Matrix y_;
    std::vector<std::string> ids_;
    std::optional<Labels> latent_;
};

enum class SplitMode { transductive, inductive };

std::string to_string(SplitMode mode);
SplitMode parse_split_mode(const std::string& text);

/// Training pools, paired set, and test sets for one run.
///
/// `x_test_truth` holds the hidden y-side vector of every x_test row (and
/// `y_test_truth` the hidden x-side vector of every y_test row). They are
/// populated when the pairing is known and are used only for scoring.
struct DataSplit {
    PointSet x_pool;
    PointSet y_pool;
    PairedSet paired;
    PointSet x_test;
    PointSet y_test;
    Matrix x_test_truth;
    Matrix y_test_truth;
    SplitMode mode = SplitMode::transductive;
    bool pools_enlarged = false;

    /// Inverse problem: y plays the input role, x the output role.
    DataSplit swapped() const;
};

}  // namespace bridged

#endif  // BRIDGED_TYPES_HPP
