#include "wrmsm/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "wrmsm/errors.hpp"
#include "wrmsm/seed.hpp"

namespace wrmsm {

std::size_t ClusterScheme::smallest_cluster() const {
    std::size_t smallest = std::numeric_limits<std::size_t>::max();
    for (const auto& c : clusters) smallest = std::min(smallest, c.size());
    return clusters.empty() ? 0 : smallest;
}

EpsilonGraph epsilon_graph(std::span<const double> points, double eps) {
    if (!(eps > 0.0)) throw DomainError("epsilon must be positive");
    for (double x : points)
        if (!std::isfinite(x)) throw DomainError("epsilon graph points must be finite");
    const auto p = static_cast<Eigen::Index>(points.size());
    EpsilonGraph g;
    g.epsilon = eps;
    g.adjacency = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < i; ++j)
            if (std::abs(points[static_cast<std::size_t>(i)] - points[static_cast<std::size_t>(j)]) < eps)
                g.adjacency(i, j) = g.adjacency(j, i) = 1.0;
    return g;
}

Eigen::MatrixXd laplacian_matrix(const EpsilonGraph& graph) {
    Eigen::MatrixXd lap = -graph.adjacency;
    lap.diagonal() = graph.adjacency.rowwise().sum();
    return lap;
}

LaplacianSpectrum laplacian_spectrum(const EpsilonGraph& graph) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian_matrix(graph));
    if (solver.info() != Eigen::Success) throw DegenerateError("Laplacian eigendecomposition failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

int eigengap_count(const Eigen::VectorXd& theta) {
    const Eigen::Index p = theta.size();
    if (p < 2) throw DomainError("eigengap needs at least two eigenvalues");
    // Gaps within this tolerance count as ties; the smaller index wins.
    const double tol = 1e-9 * std::max(1.0, theta.cwiseAbs().maxCoeff());
    int best = 1;
    double best_gap = std::abs(theta[1] - theta[0]);
    for (Eigen::Index l = 2; l < p; ++l) {
        const double gap = std::abs(theta[l] - theta[l - 1]);
        if (gap > best_gap + tol) {
            best_gap = gap;
            best = static_cast<int>(l);
        }
    }
    return best;
}

int eigengap_count(const LaplacianSpectrum& spectrum) { return eigengap_count(spectrum.eigenvalues); }

Eigen::MatrixXd spectral_embed(const LaplacianSpectrum& spectrum, int r_hat) {
    if (r_hat < 1 || r_hat > spectrum.eigenvectors.cols())
        throw DomainError("embedding dimension outside 1..p");
    return spectrum.eigenvectors.leftCols(r_hat);
}

std::size_t distinct_rows(const Eigen::MatrixXd& points) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(points.rows()));
    std::iota(idx.begin(), idx.end(), 0);
    auto less = [&](Eigen::Index a, Eigen::Index b) {
        for (Eigen::Index c = 0; c < points.cols(); ++c) {
            if (points(a, c) < points(b, c)) return true;
            if (points(a, c) > points(b, c)) return false;
        }
        return false;
    };
    std::sort(idx.begin(), idx.end(), less);
    std::size_t count = idx.empty() ? 0 : 1;
    for (std::size_t i = 1; i < idx.size(); ++i)
        if (less(idx[i - 1], idx[i])) ++count;
    return count;
}

KMeansResult kmeans(const Eigen::MatrixXd& points, int kappa, std::uint64_t seed, int max_iters) {
    const Eigen::Index count = points.rows();
    if (kappa < 1) throw DomainError("k-means needs kappa >= 1");
    if (static_cast<std::size_t>(kappa) > distinct_rows(points)) {
        std::ostringstream os;
        os << "k-means with kappa = " << kappa << " exceeds the number of distinct points ("
           << distinct_rows(points) << ")";
        throw DomainError(os.str());
    }

    auto sq = [&](Eigen::Index i, const Eigen::RowVectorXd& c) { return (points.row(i) - c).squaredNorm(); };

    KMeansResult res;
    res.centers.resize(kappa, points.cols());
    Rng rng(seed);
    std::uniform_int_distribution<Eigen::Index> first(0, count - 1);
    res.centers.row(0) = points.row(first(rng));
    Eigen::VectorXd nearest(count);
    for (Eigen::Index i = 0; i < count; ++i) nearest[i] = sq(i, res.centers.row(0));
    for (int c = 1; c < kappa; ++c) {
        Eigen::Index far = 0;
        nearest.maxCoeff(&far);
        res.centers.row(c) = points.row(far);
        for (Eigen::Index i = 0; i < count; ++i) nearest[i] = std::min(nearest[i], sq(i, res.centers.row(c)));
    }

    res.labels.assign(static_cast<std::size_t>(count), 0);
    for (int iter = 1; iter <= max_iters; ++iter) {
        res.iterations = iter;
        for (Eigen::Index i = 0; i < count; ++i) {
            int best = 0;
            double best_d = sq(i, res.centers.row(0));
            for (int c = 1; c < kappa; ++c) {
                const double d = sq(i, res.centers.row(c));
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            res.labels[static_cast<std::size_t>(i)] = best;
        }

        // Centroids accumulate offsets from one member so that coincident points average exactly.
        Eigen::MatrixXd next = Eigen::MatrixXd::Zero(kappa, points.cols());
        std::vector<Eigen::Index> sizes(static_cast<std::size_t>(kappa), 0), anchor(static_cast<std::size_t>(kappa), -1);
        for (Eigen::Index i = 0; i < count; ++i) {
            const auto c = static_cast<std::size_t>(res.labels[static_cast<std::size_t>(i)]);
            if (anchor[c] < 0) anchor[c] = i;
            next.row(static_cast<Eigen::Index>(c)) += points.row(i) - points.row(anchor[c]);
            ++sizes[c];
        }
        for (int c = 0; c < kappa; ++c) {
            if (sizes[static_cast<std::size_t>(c)] > 0) {
                next.row(c) = points.row(anchor[static_cast<std::size_t>(c)]) +
                              next.row(c) / static_cast<double>(sizes[static_cast<std::size_t>(c)]);
                continue;
            }
            // Empty cluster: move it to the point worst served by its own center.
            Eigen::Index far = 0;
            double far_d = -1.0;
            for (Eigen::Index i = 0; i < count; ++i) {
                const int own = res.labels[static_cast<std::size_t>(i)];
                if (sizes[static_cast<std::size_t>(own)] < 2) continue;
                const double d = sq(i, res.centers.row(own));
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            --sizes[static_cast<std::size_t>(res.labels[static_cast<std::size_t>(far)])];
            res.labels[static_cast<std::size_t>(far)] = c;
            sizes[static_cast<std::size_t>(c)] = 1;
            next.row(c) = points.row(far);
        }

        const bool unchanged = (next.array() == res.centers.array()).all();
        res.centers = std::move(next);
        if (unchanged) {
            res.converged = true;
            break;
        }
    }
    if (!res.converged) {
        // Labels must agree with the final centers.
        for (Eigen::Index i = 0; i < count; ++i) {
            int best = res.labels[static_cast<std::size_t>(i)];
            double best_d = sq(i, res.centers.row(best));
            for (int c = 0; c < kappa; ++c) {
                const double d = sq(i, res.centers.row(c));
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            res.labels[static_cast<std::size_t>(i)] = best;
        }
    }
    return res;
}

namespace {

// Mean taken relative to the first member, exact when all members coincide.
double anchored_mean(std::span<const double> values, const std::vector<std::size_t>& members) {
    const double anchor = values[members.front()];
    double s = 0.0;
    for (auto i : members) s += values[i] - anchor;
    return anchor + s / static_cast<double>(members.size());
}

}  // namespace

double icsd(std::span<const double> values, const std::vector<std::vector<std::size_t>>& clusters) {
    double total = 0.0;
    for (const auto& c : clusters) {
        if (c.empty()) continue;
        const double mean = anchored_mean(values, c);
        double ss = 0.0;
        for (auto i : c) ss += (values[i] - mean) * (values[i] - mean);
        total += std::sqrt(ss / static_cast<double>(c.size()));
    }
    return total;
}

ClusterScheme make_scheme(std::span<const double> values, const std::vector<int>& labels,
                          double epsilon) {
    if (labels.size() != values.size()) throw DomainError("labels and values differ in length");
    int top = -1;
    for (int l : labels) {
        if (l < 0) throw DomainError("negative cluster label");
        top = std::max(top, l);
    }
    std::vector<std::vector<std::size_t>> groups(static_cast<std::size_t>(top + 1));
    for (std::size_t i = 0; i < labels.size(); ++i) groups[static_cast<std::size_t>(labels[i])].push_back(i);
    std::erase_if(groups, [](const auto& g) { return g.empty(); });

    std::vector<double> means;
    for (const auto& g : groups) means.push_back(anchored_mean(values, g));
    std::vector<std::size_t> order(groups.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return means[a] < means[b]; });

    ClusterScheme s;
    s.epsilon_used = epsilon;
    s.r_hat = static_cast<int>(groups.size());
    s.assignments.assign(values.size(), -1);
    const double p = static_cast<double>(values.size());
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        auto& g = groups[order[rank]];
        for (auto i : g) s.assignments[i] = static_cast<int>(rank);
        s.mode_estimates.push_back(means[order[rank]]);
        s.prob_estimates.push_back(static_cast<double>(g.size()) / p);
        s.clusters.push_back(std::move(g));
    }
    s.icsd = icsd(values, s.clusters);
    return s;
}

ClusterScheme hdes(std::span<const double> values, double eps, std::uint64_t seed) {
    if (values.size() < 2) throw DomainError("HDeES needs at least two log-eigenvalues");
    const auto graph = epsilon_graph(values, eps);
    const auto spectrum = laplacian_spectrum(graph);
    const int r_hat = eigengap_count(spectrum);
    if (r_hat == 1) return make_scheme(values, std::vector<int>(values.size(), 0), eps);
    const Eigen::MatrixXd embedded = spectral_embed(spectrum, r_hat);
    const auto km = kmeans(embedded, r_hat, seed);
    return make_scheme(values, km.labels, eps);
}

ClusterScheme hdes(const LogEigenSet& h_set, double eps, std::uint64_t seed) {
    return hdes(std::span<const double>(h_set.values), eps, seed);
}

}  // namespace wrmsm
