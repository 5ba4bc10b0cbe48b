#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <ostream>

#include "mad/ingest.hpp"
#include "mad/log.hpp"
#include "mad/rng.hpp"

namespace mad::ingest {

namespace {

constexpr std::array<SplitTag, 4> kTagOrder = {SplitTag::train, SplitTag::validation,
                                               SplitTag::calibration, SplitTag::test};

// largest-remainder apportionment; sizes sum to n exactly
std::array<size_t, 4> apportion(const std::array<double, 4>& fractions, size_t n) {
    std::array<size_t, 4> sizes{};
    std::array<double, 4> remainder{};
    size_t assigned = 0;
    for (size_t k = 0; k < 4; ++k) {
        const double target = fractions[k] * static_cast<double>(n);
        sizes[k] = static_cast<size_t>(std::floor(target + 1e-9));
        remainder[k] = target - static_cast<double>(sizes[k]);
        assigned += sizes[k];
    }
    while (assigned < n) {
        size_t best = 0;
        for (size_t k = 1; k < 4; ++k)
            if (remainder[k] > remainder[best]) best = k;
        ++sizes[best];
        remainder[best] = -1.0;
        ++assigned;
    }
    return sizes;
}

void assign_tags(std::vector<SplitTag>& tags, const std::vector<size_t>& order,
                 const std::array<size_t, 4>& sizes) {
    size_t pos = 0;
    for (size_t k = 0; k < 4; ++k)
        for (size_t j = 0; j < sizes[k]; ++j) tags[order[pos++]] = kTagOrder[k];
}

} // namespace

DatasetTable split(const DatasetTable& dataset, const SplitFractions& fractions, uint64_t seed,
                   bool stratify_on_labels) {
    const std::array<double, 4> frac = {fractions.train, fractions.validation, fractions.calibration,
                                        fractions.test};
    double sum = 0.0;
    for (double f : frac) {
        if (f < 0.0 || !std::isfinite(f)) raise(Err::config_error, "split fractions must be >= 0");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        raise(Err::config_error, "split fractions must sum to 1, got " + std::to_string(sum));

    DatasetTable out = dataset;
    StreamRng rng = StreamRng(seed).stream("split");

    if (stratify_on_labels && dataset.labels) {
        std::vector<size_t> normals, anomalies;
        for (size_t r = 0; r < dataset.rows; ++r)
            ((*dataset.labels)[r] == 1 ? anomalies : normals).push_back(r);
        rng.shuffle(normals);
        rng.shuffle(anomalies);
        assign_tags(out.split_tags, normals, apportion(frac, normals.size()));
        assign_tags(out.split_tags, anomalies, apportion(frac, anomalies.size()));
    } else {
        std::vector<size_t> order(dataset.rows);
        std::iota(order.begin(), order.end(), size_t{0});
        rng.shuffle(order);
        assign_tags(out.split_tags, order, apportion(frac, dataset.rows));
    }

    // calibration must hold normals only (conformal exchangeability)
    if (out.labels) {
        size_t moved = 0;
        for (size_t r = 0; r < out.rows; ++r) {
            if (out.split_tags[r] == SplitTag::calibration && (*out.labels)[r] == 1) {
                out.split_tags[r] = SplitTag::train;
                ++moved;
            }
        }
        if (moved > 0)
            log::info("moved " + std::to_string(moved) + " anomalies from calibration to train");
    }

    for (size_t k = 0; k < 4; ++k) {
        if (frac[k] <= 0.0) continue;
        const size_t count = rows_with_tag(out, kTagOrder[k]).size();
        if (count == 0)
            raise(Err::insufficient_rows, std::string("split '") + split_tag_name(kTagOrder[k]) +
                                              "' is empty despite a positive fraction");
    }
    return out;
}

} // namespace mad::ingest
