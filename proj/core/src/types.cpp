#include "bridged/types.hpp"

#include <fmt/format.h>

namespace bridged {

namespace {

std::vector<std::string> default_ids(std::size_t n) {
    std::vector<std::string> ids;
    ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
    return ids;
}

}  // namespace

PointSet::PointSet(Matrix points, std::vector<std::string> ids, std::optional<Labels> latent)
    : points_(std::move(points)), ids_(std::move(ids)), latent_(std::move(latent)) {
    const auto n = size();
    if (n > 0 && points_.cols() < 1) throw DimensionError("point set has dimension 0");
    if (ids_.empty()) ids_ = default_ids(n);
    if (ids_.size() != n) {
        throw ArgumentError(fmt::format("point set has {} rows but {} ids", n, ids_.size()));
    }
    if (latent_ && latent_->size() != n) {
        throw ArgumentError(
            fmt::format("point set has {} rows but {} latent labels", n, latent_->size()));
    }
    if (latent_) {
        for (std::size_t i = 0; i < n; ++i) {
            if ((*latent_)[i] < 0) {
                throw ArgumentError(fmt::format("negative latent label at row {}", i));
            }
        }
    }
    index_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!index_.emplace(ids_[i], i).second) {
            throw ArgumentError(fmt::format("duplicate id '{}'", ids_[i]));
        }
    }
}

std::optional<std::size_t> PointSet::find(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

const Labels& PointSet::latent() const {
    if (!latent_) throw EvaluationError("point set carries no latent labels");
    return *latent_;
}

int PointSet::latent_classes() const {
    if (!latent_) return 0;
    int top = -1;
    for (int l : *latent_) top = std::max(top, l);
    return top + 1;
}

void PointSet::check_latent_range(int classes) const {
    if (!latent_) return;
    for (std::size_t i = 0; i < latent_->size(); ++i) {
        const int l = (*latent_)[i];
        if (l < 0 || l >= classes) {
            throw ArgumentError(
                fmt::format("latent label {} at row {} outside [0, {})", l, i, classes));
        }
    }
}

PointSet PointSet::subset(std::span<const std::size_t> rows) const {
    Matrix pts(static_cast<Eigen::Index>(rows.size()), points_.cols());
    std::vector<std::string> ids;
    ids.reserve(rows.size());
    std::optional<Labels> lat;
    if (latent_) lat.emplace();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto i = rows[r];
        if (i >= size()) throw ArgumentError(fmt::format("row {} out of range", i));
        pts.row(static_cast<Eigen::Index>(r)) = points_.row(static_cast<Eigen::Index>(i));
        ids.push_back(ids_[i]);
        if (lat) lat->push_back((*latent_)[i]);
    }
    return PointSet(std::move(pts), std::move(ids), std::move(lat));
}

PointSet PointSet::concat(const PointSet& a, const PointSet& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    if (a.dim() != b.dim()) {
        throw DimensionError(fmt::format("cannot concatenate d={} with d={}", a.dim(), b.dim()));
    }
    Matrix pts(a.points_.rows() + b.points_.rows(), a.points_.cols());
    pts << a.points_, b.points_;
    std::vector<std::string> ids = a.ids_;
    ids.insert(ids.end(), b.ids_.begin(), b.ids_.end());
    std::optional<Labels> lat;
    if (a.latent_ && b.latent_) {
        lat = *a.latent_;
        lat->insert(lat->end(), b.latent_->begin(), b.latent_->end());
    }
    return PointSet(std::move(pts), std::move(ids), std::move(lat));
}

PairedSet::PairedSet(Matrix x, Matrix y, std::vector<std::string> ids, std::optional<Labels> latent)
    : x_(std::move(x)), y_(std::move(y)), ids_(std::move(ids)), latent_(std::move(latent)) {
    if (x_.rows() < 1) throw ArgumentError("paired set must contain at least one pair");
    if (x_.rows() != y_.rows()) {
        throw DimensionError(
            fmt::format("paired set has {} x rows but {} y rows", x_.rows(), y_.rows()));
    }
    if (x_.cols() < 1 || y_.cols() < 1) throw DimensionError("paired set has dimension 0");
    if (ids_.empty()) ids_ = default_ids(size());
    if (ids_.size() != size()) throw ArgumentError("paired set id count mismatch");
    if (latent_ && latent_->size() != size()) {
        throw ArgumentError("paired set latent count mismatch");
    }
}

const Labels& PairedSet::latent() const {
    if (!latent_) throw EvaluationError("paired set carries no latent labels");
    return *latent_;
}

PointSet PairedSet::x_points() const { return PointSet(x_, ids_, latent_); }
PointSet PairedSet::y_points() const { return PointSet(y_, ids_, latent_); }

PairedSet PairedSet::swapped() const {
    if (empty()) return {};
    return PairedSet(y_, x_, ids_, latent_);
}

std::string to_string(SplitMode mode) {
    return mode == SplitMode::transductive ? "transductive" : "inductive";
}

SplitMode parse_split_mode(const std::string& text) {
    if (text == "transductive") return SplitMode::transductive;
    if (text == "inductive") return SplitMode::inductive;
    throw ArgumentError(fmt::format("unknown split mode '{}'", text));
}

DataSplit DataSplit::swapped() const {
    DataSplit s;
    s.x_pool = y_pool;
    s.y_pool = x_pool;
    s.paired = paired.swapped();
    s.x_test = y_test;
    s.y_test = x_test;
    s.x_test_truth = y_test_truth;
    s.y_test_truth = x_test_truth;
    s.mode = mode;
    s.pools_enlarged = pools_enlarged;
    return s;
}

}  // namespace bridged
