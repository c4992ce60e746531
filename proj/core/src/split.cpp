#include "bridged/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "bridged/random.hpp"

namespace bridged {

namespace {

struct Sample {
    std::size_t x_row;
    std::size_t y_row;
};

Matrix gather_rows(const Matrix& src, const std::vector<std::size_t>& rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), src.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out.row(static_cast<Eigen::Index>(r)) = src.row(static_cast<Eigen::Index>(rows[r]));
    }
    return out;
}

std::size_t fraction_count(double fraction, std::size_t n) {
    return std::min(n, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n))));
}

}  // namespace

Pairing pair_by_id(const PointSet& x, const PointSet& y) {
    Pairing out;
    for (const auto& id : x.ids()) {
        if (y.find(id)) out.emplace_back(id, id);
    }
    return out;
}

DataSplit make_split(const PointSet& x, const PointSet& y, const Pairing& pairing,
                     const SplitOptions& options, RngSeed seed) {
    if (options.pairs_per_cluster < 1) throw ArgumentError("pairs_per_cluster must be >= 1");
    if (options.holdout_fraction < 0.0 || options.holdout_fraction >= 1.0) {
        throw ArgumentError("holdout_fraction must be in [0, 1)");
    }
    if (options.minor_pool_fraction < 0.0 || options.minor_pool_fraction > 1.0) {
        throw ArgumentError("minor_pool_fraction must be in [0, 1]");
    }

    std::vector<Sample> samples;
    samples.reserve(pairing.size());
    std::vector<char> x_paired(x.size(), 0);
    std::vector<char> y_paired(y.size(), 0);
    for (const auto& [xid, yid] : pairing) {
        const auto xr = x.find(xid);
        const auto yr = y.find(yid);
        if (!xr) throw SplitError(fmt::format("pairing references unknown x id '{}'", xid));
        if (!yr) throw SplitError(fmt::format("pairing references unknown y id '{}'", yid));
        if (x_paired[*xr] || y_paired[*yr]) {
            throw SplitError(fmt::format("id pair ('{}', '{}') used twice", xid, yid));
        }
        x_paired[*xr] = y_paired[*yr] = 1;
        samples.push_back({*xr, *yr});
    }

    auto engine = make_engine(seed);

    // Group by latent label (ordered) so the draw order is fixed.
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t s = 0; s < samples.size(); ++s) {
        const int g = x.has_latent() ? x.latent()[samples[s].x_row] : 0;
        groups[g].push_back(s);
    }
    if (groups.empty()) throw SplitError("pairing is empty");

    std::vector<char> is_paired(samples.size(), 0);
    std::vector<std::size_t> paired_samples;
    const auto want = static_cast<std::size_t>(options.pairs_per_cluster);
    for (auto& [label, members] : groups) {
        if (members.size() < want) {
            throw SplitError(fmt::format("latent group {} has {} paired samples, {} requested",
                                         label, members.size(), want));
        }
        std::shuffle(members.begin(), members.end(), engine);
        for (std::size_t i = 0; i < want; ++i) {
            is_paired[members[i]] = 1;
            paired_samples.push_back(members[i]);
        }
    }
    std::sort(paired_samples.begin(), paired_samples.end());

    std::vector<std::size_t> rest;
    for (std::size_t s = 0; s < samples.size(); ++s) {
        if (!is_paired[s]) rest.push_back(s);
    }
    std::shuffle(rest.begin(), rest.end(), engine);

    std::vector<std::size_t> test_samples;
    if (options.mode == SplitMode::inductive) {
        const auto n_test = fraction_count(options.holdout_fraction, rest.size());
        test_samples.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(n_test));
        rest.erase(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(n_test));
        std::sort(test_samples.begin(), test_samples.end());
    }

    std::vector<std::size_t> x_rows;
    std::vector<std::size_t> y_rows;
    if (options.pools == PoolPolicy::shared) {
        for (auto s : rest) {
            x_rows.push_back(samples[s].x_row);
            y_rows.push_back(samples[s].y_row);
        }
    } else {
        const auto n_minor = fraction_count(options.minor_pool_fraction, rest.size());
        for (std::size_t i = 0; i < rest.size(); ++i) {
            const bool minor = i < n_minor;
            const bool to_y = options.inverse ? !minor : minor;
            if (to_y) {
                y_rows.push_back(samples[rest[i]].y_row);
            } else {
                x_rows.push_back(samples[rest[i]].x_row);
            }
        }
    }
    for (std::size_t r = 0; r < x.size(); ++r) {
        if (!x_paired[r]) x_rows.push_back(r);
    }
    for (std::size_t r = 0; r < y.size(); ++r) {
        if (!y_paired[r]) y_rows.push_back(r);
    }
    std::sort(x_rows.begin(), x_rows.end());
    std::sort(y_rows.begin(), y_rows.end());

    std::vector<std::size_t> px;
    std::vector<std::size_t> py;
    std::vector<std::string> pids;
    std::optional<Labels> plat;
    if (x.has_latent()) plat.emplace();
    for (auto s : paired_samples) {
        px.push_back(samples[s].x_row);
        py.push_back(samples[s].y_row);
        pids.push_back(x.id(samples[s].x_row));
        if (plat) plat->push_back(x.latent()[samples[s].x_row]);
    }

    DataSplit split;
    split.mode = options.mode;
    split.paired = PairedSet(gather_rows(x.points(), px), gather_rows(y.points(), py),
                             std::move(pids), std::move(plat));
    split.x_pool = x.subset(x_rows);
    split.y_pool = y.subset(y_rows);
    if (options.enlarge_pools) {
        split.x_pool = PointSet::concat(split.x_pool, x.subset(px));
        split.y_pool = PointSet::concat(split.y_pool, y.subset(py));
        split.pools_enlarged = true;
    }

    const auto k = split.paired.size();
    if (k > std::min(split.x_pool.size(), split.y_pool.size())) {
        throw SplitError(fmt::format("paired set ({}) larger than a pool (n_X={}, n_Y={})", k,
                                     split.x_pool.size(), split.y_pool.size()));
    }

    // Partner lookup for scoring: x row -> y row and back.
    std::vector<std::ptrdiff_t> partner_of_x(x.size(), -1);
    std::vector<std::ptrdiff_t> partner_of_y(y.size(), -1);
    for (const auto& s : samples) {
        partner_of_x[s.x_row] = static_cast<std::ptrdiff_t>(s.y_row);
        partner_of_y[s.y_row] = static_cast<std::ptrdiff_t>(s.x_row);
    }
    auto truth_for = [](const PointSet& test, const PointSet& own, const PointSet& other,
                        const std::vector<std::ptrdiff_t>& partner) {
        std::vector<std::size_t> rows;
        for (const auto& id : test.ids()) {
            const auto p = partner[*own.find(id)];
            if (p < 0) return Matrix();
            rows.push_back(static_cast<std::size_t>(p));
        }
        return gather_rows(other.points(), rows);
    };

    if (options.mode == SplitMode::transductive) {
        split.x_test = split.x_pool;
        split.y_test = split.y_pool;
    } else {
        std::vector<std::size_t> tx;
        std::vector<std::size_t> ty;
        for (auto s : test_samples) {
            tx.push_back(samples[s].x_row);
            ty.push_back(samples[s].y_row);
        }
        split.x_test = x.subset(tx);
        split.y_test = y.subset(ty);
    }
    split.x_test_truth = truth_for(split.x_test, x, y, partner_of_x);
    split.y_test_truth = truth_for(split.y_test, y, x, partner_of_y);
    return split;
}

}  // namespace bridged
