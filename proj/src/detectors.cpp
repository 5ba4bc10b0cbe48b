// The five built-in detectors. Each is deliberately from a different family
// so the pool disagrees in interesting ways: covariance distance, k-NN
// distance, histogram density, isolation forest, and PCA reconstruction.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "mad/agents.hpp"

namespace mad::agents {

namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(m.rows), static_cast<Eigen::Index>(m.cols));
    for (size_t r = 0; r < m.rows; ++r)
        for (size_t c = 0; c < m.cols; ++c) out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m.at(r, c);
    return out;
}

void check_dim(size_t expected, size_t got) {
    if (expected != got)
        raise(Err::dimension_mismatch, "row has " + std::to_string(got) + " features, fitted on " +
                                           std::to_string(expected));
}

// ---------------------------------------------------------------------------

class MahalanobisDetector final : public Detector {
public:
    void fit(const Matrix& train, const int8_t*, StreamRng) override {
        const Eigen::MatrixXd x = to_eigen(train);
        dim_ = train.cols;
        mean_ = x.colwise().mean();
        const Eigen::MatrixXd centered = x.rowwise() - mean_.transpose();
        Eigen::MatrixXd cov =
            (centered.transpose() * centered) / static_cast<double>(train.rows);
        // shrinkage keeps the factorization well-posed on collinear features
        const double tau =
            std::max(1e-3 * cov.trace() / static_cast<double>(dim_), kStdFloor);
        cov.diagonal().array() += tau;
        llt_.compute(cov);
    }

    double raw_score(std::span<const double> row) const override {
        check_dim(dim_, row.size());
        Eigen::VectorXd z(static_cast<Eigen::Index>(dim_));
        for (size_t j = 0; j < dim_; ++j) z(static_cast<Eigen::Index>(j)) = row[j];
        z -= mean_;
        return z.dot(llt_.solve(z));
    }

    const char* name() const override { return "mahalanobis"; }

private:
    size_t dim_ = 0;
    Eigen::VectorXd mean_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
};

// ---------------------------------------------------------------------------

class KnnDetector final : public Detector {
public:
    explicit KnnDetector(int k) : k_(k) {}

    void fit(const Matrix& train, const int8_t*, StreamRng) override {
        train_ = train;
        k_eff_ = std::min<size_t>(static_cast<size_t>(k_), train.rows);
    }

    double raw_score(std::span<const double> row) const override {
        check_dim(train_.cols, row.size());
        std::vector<double> sq(train_.rows);
        const size_t d = train_.cols;
        for (size_t r = 0; r < train_.rows; ++r) {
            const double* tr = train_.data.data() + r * d;
            double acc = 0.0;
            for (size_t j = 0; j < d; ++j) {
                const double diff = tr[j] - row[j];
                acc += diff * diff;
            }
            sq[r] = acc;
        }
        std::nth_element(sq.begin(), sq.begin() + static_cast<long>(k_eff_ - 1), sq.end());
        double sum = 0.0;
        for (size_t i = 0; i < k_eff_; ++i) sum += std::sqrt(sq[i]);
        return sum / static_cast<double>(k_eff_);
    }

    const char* name() const override { return "knn_dist"; }

private:
    int k_;
    size_t k_eff_ = 1;
    Matrix train_;
};

// ---------------------------------------------------------------------------

class HistogramDetector final : public Detector {
public:
    explicit HistogramDetector(int bins) : bins_(static_cast<size_t>(bins)) {}

    void fit(const Matrix& train, const int8_t*, StreamRng) override {
        dim_ = train.cols;
        lo_.assign(dim_, 0.0);
        hi_.assign(dim_, 0.0);
        density_.assign(dim_ * bins_, 0.0);
        for (size_t j = 0; j < dim_; ++j) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -std::numeric_limits<double>::infinity();
            for (size_t r = 0; r < train.rows; ++r) {
                lo = std::min(lo, train.at(r, j));
                hi = std::max(hi, train.at(r, j));
            }
            lo_[j] = lo;
            hi_[j] = hi;
            const double width = hi - lo;
            for (size_t r = 0; r < train.rows; ++r) {
                const size_t b =
                    width > 0.0
                        ? std::min(bins_ - 1, static_cast<size_t>((train.at(r, j) - lo) / width *
                                                                  static_cast<double>(bins_)))
                        : 0;
                density_[j * bins_ + b] += 1.0;
            }
            for (size_t b = 0; b < bins_; ++b) density_[j * bins_ + b] /= static_cast<double>(train.rows);
        }
    }

    double raw_score(std::span<const double> row) const override {
        check_dim(dim_, row.size());
        double score = 0.0;
        for (size_t j = 0; j < dim_; ++j) {
            double mass = 0.0;
            const double v = row[j];
            if (v >= lo_[j] && v <= hi_[j]) {
                const double width = hi_[j] - lo_[j];
                const size_t b =
                    width > 0.0
                        ? std::min(bins_ - 1,
                                   static_cast<size_t>((v - lo_[j]) / width * static_cast<double>(bins_)))
                        : 0;
                mass = density_[j * bins_ + b];
            }
            score += -std::log(mass + 1e-12);
        }
        return score;
    }

    const char* name() const override { return "histogram"; }

private:
    size_t bins_;
    size_t dim_ = 0;
    std::vector<double> lo_, hi_;
    std::vector<double> density_; // per (feature, bin) probability mass
};

// ---------------------------------------------------------------------------

// harmonic-number path normalizer c(n) from the isolation-forest paper
double iforest_c(size_t n) {
    if (n <= 1) return 0.0;
    if (n == 2) return 1.0;
    const double m = static_cast<double>(n - 1);
    const double harmonic = std::log(m) + 0.5772156649015329;
    return 2.0 * harmonic - 2.0 * m / static_cast<double>(n);
}

class IsolationForestDetector final : public Detector {
public:
    IsolationForestDetector(int trees, int subsample) : n_trees_(trees), subsample_(subsample) {}

    void fit(const Matrix& train, const int8_t*, StreamRng rng) override {
        dim_ = train.cols;
        psi_ = std::min<size_t>(static_cast<size_t>(subsample_), train.rows);
        max_depth_ = static_cast<size_t>(std::ceil(std::log2(std::max<double>(2.0, static_cast<double>(psi_)))));
        trees_.clear();
        trees_.resize(static_cast<size_t>(n_trees_));

        std::vector<size_t> all(train.rows);
        std::iota(all.begin(), all.end(), size_t{0});
        for (size_t t = 0; t < trees_.size(); ++t) {
            StreamRng tree_rng = rng.stream(t);
            // subsample without replacement via partial Fisher-Yates
            std::vector<size_t> pick = all;
            for (size_t i = 0; i < psi_; ++i) {
                const size_t j = i + static_cast<size_t>(tree_rng.below(pick.size() - i));
                std::swap(pick[i], pick[j]);
            }
            pick.resize(psi_);
            build(trees_[t], train, pick, 0, tree_rng);
        }
    }

    double raw_score(std::span<const double> row) const override {
        check_dim(dim_, row.size());
        double total = 0.0;
        for (const Tree& tree : trees_) total += path_length(tree, row);
        const double avg = total / static_cast<double>(trees_.size());
        return std::pow(2.0, -avg / iforest_c(psi_));
    }

    const char* name() const override { return "iforest"; }

private:
    struct Node {
        int feature = -1; // -1 marks a leaf
        double split = 0.0;
        int left = -1;
        int right = -1;
        size_t size = 0;
    };
    struct Tree {
        std::vector<Node> nodes;
    };

    int build(Tree& tree, const Matrix& train, std::vector<size_t> rows, size_t depth,
              StreamRng& rng) {
        const int id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({});
        tree.nodes[static_cast<size_t>(id)].size = rows.size();
        if (rows.size() <= 1 || depth >= max_depth_) return id;

        // eligible features: those not constant within this node
        std::vector<int> eligible;
        std::vector<std::pair<double, double>> ranges(dim_);
        for (size_t j = 0; j < dim_; ++j) {
            double lo = train.at(rows[0], j), hi = lo;
            for (size_t r : rows) {
                lo = std::min(lo, train.at(r, j));
                hi = std::max(hi, train.at(r, j));
            }
            ranges[j] = {lo, hi};
            if (hi > lo) eligible.push_back(static_cast<int>(j));
        }
        if (eligible.empty()) return id;

        const int feature = eligible[rng.below(eligible.size())];
        const auto [lo, hi] = ranges[static_cast<size_t>(feature)];
        const double split = lo + rng.uniform01() * (hi - lo);

        std::vector<size_t> left_rows, right_rows;
        for (size_t r : rows)
            (train.at(r, static_cast<size_t>(feature)) < split ? left_rows : right_rows).push_back(r);
        if (left_rows.empty() || right_rows.empty()) return id; // split landed on the boundary

        tree.nodes[static_cast<size_t>(id)].feature = feature;
        tree.nodes[static_cast<size_t>(id)].split = split;
        const int left = build(tree, train, std::move(left_rows), depth + 1, rng);
        tree.nodes[static_cast<size_t>(id)].left = left;
        const int right = build(tree, train, std::move(right_rows), depth + 1, rng);
        tree.nodes[static_cast<size_t>(id)].right = right;
        return id;
    }

    double path_length(const Tree& tree, std::span<const double> row) const {
        size_t node = 0;
        double depth = 0.0;
        while (tree.nodes[node].feature >= 0) {
            node = row[static_cast<size_t>(tree.nodes[node].feature)] < tree.nodes[node].split
                       ? static_cast<size_t>(tree.nodes[node].left)
                       : static_cast<size_t>(tree.nodes[node].right);
            depth += 1.0;
        }
        return depth + iforest_c(tree.nodes[node].size);
    }

    int n_trees_;
    int subsample_;
    size_t dim_ = 0;
    size_t psi_ = 0;
    size_t max_depth_ = 0;
    std::vector<Tree> trees_;
};

// ---------------------------------------------------------------------------

class PcaReconDetector final : public Detector {
public:
    explicit PcaReconDetector(double variance_kept) : variance_kept_(variance_kept) {}

    void fit(const Matrix& train, const int8_t*, StreamRng) override {
        dim_ = train.cols;
        const Eigen::MatrixXd x = to_eigen(train);
        mean_ = x.colwise().mean();
        const Eigen::MatrixXd centered = x.rowwise() - mean_.transpose();
        const Eigen::MatrixXd cov =
            (centered.transpose() * centered) / static_cast<double>(train.rows);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
        const Eigen::VectorXd evals = solver.eigenvalues(); // ascending
        double total = 0.0;
        for (Eigen::Index i = 0; i < evals.size(); ++i) total += std::max(evals(i), 0.0);

        // smallest q (from the top) capturing the requested variance share
        Eigen::Index q = 0;
        double captured = 0.0;
        for (Eigen::Index i = evals.size() - 1; i >= 0; --i) {
            captured += std::max(evals(i), 0.0);
            ++q;
            if (total <= 0.0 || captured >= variance_kept_ * total) break;
        }
        q = std::max<Eigen::Index>(q, 1);
        components_ = solver.eigenvectors().rightCols(q);
    }

    double raw_score(std::span<const double> row) const override {
        check_dim(dim_, row.size());
        Eigen::VectorXd z(static_cast<Eigen::Index>(dim_));
        for (size_t j = 0; j < dim_; ++j) z(static_cast<Eigen::Index>(j)) = row[j];
        z -= mean_;
        const Eigen::VectorXd residual = z - components_ * (components_.transpose() * z);
        return residual.squaredNorm();
    }

    const char* name() const override { return "pca_recon"; }

private:
    double variance_kept_;
    size_t dim_ = 0;
    Eigen::VectorXd mean_;
    Eigen::MatrixXd components_;
};

} // namespace

const char* detector_kind_name(DetectorKind kind) {
    switch (kind) {
        case DetectorKind::mahalanobis: return "mahalanobis";
        case DetectorKind::knn_dist: return "knn_dist";
        case DetectorKind::histogram: return "histogram";
        case DetectorKind::iforest: return "iforest";
        case DetectorKind::pca_recon: return "pca_recon";
    }
    return "?";
}

std::optional<DetectorKind> detector_kind_from_name(const std::string& name) {
    if (name == "mahalanobis") return DetectorKind::mahalanobis;
    if (name == "knn_dist") return DetectorKind::knn_dist;
    if (name == "histogram") return DetectorKind::histogram;
    if (name == "iforest") return DetectorKind::iforest;
    if (name == "pca_recon") return DetectorKind::pca_recon;
    return std::nullopt;
}

std::unique_ptr<Detector> make_detector(DetectorKind kind, const DetectorConfig& config) {
    switch (kind) {
        case DetectorKind::mahalanobis: return std::make_unique<MahalanobisDetector>();
        case DetectorKind::knn_dist: return std::make_unique<KnnDetector>(config.knn_k);
        case DetectorKind::histogram: return std::make_unique<HistogramDetector>(config.histogram_bins);
        case DetectorKind::iforest:
            return std::make_unique<IsolationForestDetector>(config.iforest_trees,
                                                             config.iforest_subsample);
        case DetectorKind::pca_recon: return std::make_unique<PcaReconDetector>(config.pca_variance_kept);
    }
    raise(Err::config_error, "unknown detector kind");
}

} // namespace mad::agents
