#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <sstream>
#include <vector>

#include "ttpc/errors.hpp"
#include "ttpc/learners.hpp"
#include "learners_detail.hpp"

namespace ttpc {

namespace {

double primal_objective(const std::vector<double>& w, double b, double C,
                        const std::vector<FeatureVector>& X,
                        const std::vector<double>& y) {
    double obj = 0.0;
    for (double v : w) obj += v * v;
    obj *= 0.5;
    for (std::size_t i = 0; i < X.size(); ++i) {
        double margin = y[i] * (X[i].dot(w) + b);
        if (margin < 1.0) obj += C * (1.0 - margin);
    }
    return obj;
}

// Adds `scale * x` onto accumulator `acc` (dense).
void axpy(std::vector<double>& acc, double scale, const FeatureVector& x) {
    if (x.kind == FeatureVector::Kind::sparse) {
        for (const auto& [idx, value] : x.entries) acc[idx] += scale * value;
    } else {
        for (std::size_t j = 0; j < x.values.size(); ++j) {
            acc[j] += scale * x.values[j];
        }
    }
}

// The huberised objective: the hinge elbow is smoothed over a band of width
// mu, giving a C^1 surrogate that sandwiches the true objective within
// C * n * mu / 2.
double smoothed_objective(const std::vector<double>& w, double b, double C,
                          const std::vector<FeatureVector>& X,
                          const std::vector<double>& y, double mu) {
    double val = 0.0;
    for (double v : w) val += v * v;
    val *= 0.5;
    for (std::size_t i = 0; i < X.size(); ++i) {
        double margin = y[i] * (X[i].dot(w) + b);
        double z = 1.0 - margin;
        if (z <= 0.0) continue;
        val += z >= mu ? C * (z - 0.5 * mu) : C * z * z / (2.0 * mu);
    }
    return val;
}

double smoothed_objective_grad(const std::vector<double>& w, double b, double C,
                               const std::vector<FeatureVector>& X,
                               const std::vector<double>& y, double mu,
                               std::vector<double>& gw, double& gb) {
    gw = w;
    gb = 0.0;
    double val = 0.0;
    for (double v : w) val += v * v;
    val *= 0.5;
    for (std::size_t i = 0; i < X.size(); ++i) {
        double margin = y[i] * (X[i].dot(w) + b);
        double z = 1.0 - margin;
        if (z <= 0.0) continue;
        double lambda;
        if (z >= mu) {
            val += C * (z - 0.5 * mu);
            lambda = 1.0;
        } else {
            val += C * z * z / (2.0 * mu);
            lambda = z / mu;
        }
        axpy(gw, -C * lambda * y[i], X[i]);
        gb -= C * lambda * y[i];
    }
    return val;
}

struct BatchResult {
    std::vector<double> w;
    double b = 0.0;
    double objective = 0.0;
    std::size_t iterations = 0;
};

// Deterministic full-gradient descent on an annealed sequence of smoothed
// objectives.  Only iterates that strictly lower the true hinge objective are
// committed (and traced), so the reported objective decreases monotonically;
// the smoothing bound C*n*mu/2 at the last stage caps the final gap.
BatchResult solve_batch(const std::vector<FeatureVector>& X,
                        const std::vector<double>& y, double C, std::size_t dim,
                        std::vector<double>* objective_trace) {
    constexpr double kMuLast = 1e-8;
    constexpr std::size_t kInnerCap = 5000;

    std::vector<double> w(dim, 0.0);
    double b = 0.0;
    BatchResult best;
    best.w = w;
    best.objective = primal_objective(w, b, C, X, y);
    if (objective_trace) objective_trace->push_back(best.objective);

    std::size_t total = 0;
    std::vector<double> gw(dim, 0.0);
    std::vector<double> wn(dim, 0.0);
    for (double mu = 1.0; mu >= kMuLast * 0.999; mu *= 0.1) {
        double eta = 1.0;
        double prev_val = std::numeric_limits<double>::infinity();
        for (std::size_t inner = 0; inner < kInnerCap; ++inner) {
            ++total;
            double gb = 0.0;
            double val = smoothed_objective_grad(w, b, C, X, y, mu, gw, gb);
            double g2 = gb * gb;
            for (double g : gw) g2 += g * g;
            if (g2 <= 1e-24 * std::max(1.0, val * val)) break;

            bool stepped = false;
            double accepted_val = 0.0;
            while (eta > 1e-18) {
                for (std::size_t j = 0; j < dim; ++j) wn[j] = w[j] - eta * gw[j];
                double bn = b - eta * gb;
                double vn = smoothed_objective(wn, bn, C, X, y, mu);
                if (vn <= val - 1e-4 * eta * g2) {
                    w.swap(wn);
                    b = bn;
                    double true_obj = primal_objective(w, b, C, X, y);
                    if (true_obj < best.objective) {
                        best.objective = true_obj;
                        best.w = w;
                        best.b = b;
                        if (objective_trace) objective_trace->push_back(true_obj);
                    }
                    eta = std::min(eta * 2.0, 1e8);
                    stepped = true;
                    accepted_val = vn;
                    break;
                }
                eta *= 0.5;
            }
            if (!stepped) break;
            if (prev_val - accepted_val <=
                1e-15 * std::max(1.0, std::abs(accepted_val))) {
                break;
            }
            prev_val = accepted_val;
        }
    }
    best.iterations = total;
    return best;
}

FittedLinearSVM make_linear_fit(std::vector<std::string> classes,
                                std::vector<double> w, double b,
                                std::size_t iterations, double objective) {
    FittedLinearSVM fitted;
    fitted.classes = std::move(classes);
    fitted.w = std::move(w);
    fitted.b = b;
    fitted.iterations = iterations;
    fitted.objective = objective;
    return fitted;
}

void require_binary(const detail::LabelIndex& index, const char* what) {
    if (index.classes.size() != 2) {
        throw DataError(std::string(what) + " requires exactly two classes, got " +
                        std::to_string(index.classes.size()));
    }
}

// Deterministic Fisher-Yates driven by a caller-seeded engine; written out
// here so the shuffle sequence does not depend on the standard library's
// std::shuffle implementation.
void fisher_yates(std::vector<std::size_t>& order, std::uint64_t& state) {
    const auto next = [&state]() {
        // xorshift64* step
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        return state * 0x2545F4914F6CDD1DULL;
    };
    for (std::size_t k = order.size(); k > 1; --k) {
        std::size_t j = static_cast<std::size_t>(next() % k);
        std::swap(order[k - 1], order[j]);
    }
}

}  // namespace

FittedLinearSVM fit_linear_svm_batch(const std::vector<FeatureVector>& X,
                                     const std::vector<std::string>& y, double C,
                                     std::vector<double>* objective_trace) {
    std::size_t dim = detail::check_design_matrix(X, y);
    detail::LabelIndex index = detail::index_labels(y);
    require_binary(index, "the batch linear SVM solver");
    std::vector<double> target = detail::signed_targets(index);
    BatchResult result = solve_batch(X, target, C, dim, objective_trace);
    return make_linear_fit(std::move(index.classes), std::move(result.w),
                           result.b, result.iterations, result.objective);
}

FittedLinearSVM fit_linear_svm_sgd(const std::vector<FeatureVector>& X,
                                   const std::vector<std::string>& y, double C,
                                   std::size_t epochs, double eta0, double decay,
                                   std::uint64_t seed) {
    std::size_t dim = detail::check_design_matrix(X, y);
    detail::LabelIndex index = detail::index_labels(y);
    require_binary(index, "the stochastic linear SVM solver");
    std::vector<double> target = detail::signed_targets(index);

    const std::size_t n = X.size();
    std::vector<double> w(dim, 0.0);
    double b = 0.0;
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::uint64_t rng = seed ^ 0x9E3779B97F4A7C15ULL;
    if (rng == 0) rng = 0x9E3779B97F4A7C15ULL;

    std::size_t t = 0;
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        fisher_yates(order, rng);
        for (std::size_t i : order) {
            double eta = eta0 / (1.0 + static_cast<double>(t) * decay);
            double margin = target[i] * (X[i].dot(w) + b);
            double keep = 1.0 - eta / static_cast<double>(n);
            for (double& v : w) v *= keep;
            if (margin < 1.0) {
                axpy(w, eta * C * target[i], X[i]);
                b += eta * C * target[i];
            }
            ++t;
        }
        double objective = primal_objective(w, b, C, X, target);
        if (!std::isfinite(objective)) {
            std::ostringstream msg;
            msg << "stochastic SVM training diverged: objective is not finite "
                << "after epoch " << (epoch + 1) << " of " << epochs
                << " (C=" << C << ", eta0=" << eta0 << ", decay=" << decay
                << "); lower eta0 or C";
            throw InternalError(msg.str());
        }
    }
    double objective = primal_objective(w, b, C, X, target);
    return make_linear_fit(std::move(index.classes), std::move(w), b, t,
                           objective);
}

// --- Sequential minimal optimisation for the RBF kernel --------------------

namespace {

struct SmoState {
    double C = 0.0;
    double tol = 1e-3;   // KKT tolerance
    double b = 0.0;
    std::vector<double> y;
    std::vector<double> alpha;
    std::vector<double> u;  // u[i] = sum_j alpha_j y_j K(j, i), excludes b
    std::vector<std::vector<double>> K;

    double error(std::size_t i) const { return u[i] + b - y[i]; }

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) return false;
        double a1 = alpha[i1], a2 = alpha[i2];
        double y1 = y[i1], y2 = y[i2];
        double e1 = error(i1), e2 = error(i2);
        double s = y1 * y2;
        double L, H;
        if (s < 0.0) {
            L = std::max(0.0, a2 - a1);
            H = std::min(C, C + a2 - a1);
        } else {
            L = std::max(0.0, a1 + a2 - C);
            H = std::min(C, a1 + a2);
        }
        if (L >= H) return false;
        double k11 = K[i1][i1], k12 = K[i1][i2], k22 = K[i2][i2];
        double eta = k11 + k22 - 2.0 * k12;
        double a2_new;
        if (eta > 0.0) {
            a2_new = a2 + y2 * (e1 - e2) / eta;
            a2_new = std::clamp(a2_new, L, H);
        } else {
            // Flat or concave along the constraint line: compare the dual
            // objective gain at both ends and take the better one.
            const auto gain = [&](double cand2) {
                double d2 = cand2 - a2;
                double d1 = -s * d2;
                double b1 = y1 * d1, b2 = y2 * d2;
                return d1 + d2 - (b1 * u[i1] + b2 * u[i2]) -
                       0.5 * (b1 * b1 * k11 + b2 * b2 * k22) - b1 * b2 * k12;
            };
            double gl = gain(L), gh = gain(H);
            constexpr double kGainEps = 1e-12;
            if (gl > gh + kGainEps) {
                a2_new = L;
            } else if (gh > gl + kGainEps) {
                a2_new = H;
            } else {
                return false;
            }
        }
        if (std::abs(a2_new - a2) < 1e-12 * (a2_new + a2 + 1e-12)) return false;
        double a1_new = a1 + s * (a2 - a2_new);
        a1_new = std::clamp(a1_new, 0.0, C);  // absorb rounding at the box edge

        double d1 = (a1_new - a1) * y1;
        double d2 = (a2_new - a2) * y2;
        double b1 = b - e1 - d1 * k11 - d2 * k12;
        double b2 = b - e2 - d1 * k12 - d2 * k22;
        bool free1 = a1_new > 0.0 && a1_new < C;
        bool free2 = a2_new > 0.0 && a2_new < C;
        double b_new = free1 ? b1 : (free2 ? b2 : 0.5 * (b1 + b2));

        for (std::size_t k = 0; k < u.size(); ++k) {
            u[k] += d1 * K[i1][k] + d2 * K[i2][k];
        }
        alpha[i1] = a1_new;
        alpha[i2] = a2_new;
        b = b_new;
        return true;
    }

    bool examine(std::size_t i2) {
        double y2 = y[i2], a2 = alpha[i2];
        double e2 = error(i2);
        double r2 = e2 * y2;
        bool violates = (r2 < -tol && a2 < C) || (r2 > tol && a2 > 0.0);
        if (!violates) return false;

        // Second-choice heuristic: the non-bound example with the largest
        // |E1 - E2|, ties resolved to the lowest index.
        std::size_t n = alpha.size();
        std::size_t best = n;
        double best_gap = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == i2 || alpha[i] <= 0.0 || alpha[i] >= C) continue;
            double gap = std::abs(error(i) - e2);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best < n && take_step(best, i2)) return true;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == i2 || alpha[i] <= 0.0 || alpha[i] >= C) continue;
            if (take_step(i, i2)) return true;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == i2) continue;
            if (take_step(i, i2)) return true;
        }
        return false;
    }
};

}  // namespace

FittedSvcRbf fit_svc_rbf(const std::vector<FeatureVector>& X,
                         const std::vector<std::string>& y, double C,
                         double gamma) {
    std::size_t dim = detail::check_design_matrix(X, y);
    detail::LabelIndex index = detail::index_labels(y);
    require_binary(index, "the RBF SVM solver");
    if (gamma <= 0.0) {
        throw UsageError("gamma must be positive for the RBF kernel");
    }

    const std::size_t n = X.size();
    std::vector<std::vector<double>> dense;
    dense.reserve(n);
    for (const FeatureVector& row : X) dense.push_back(row.to_dense());

    SmoState smo;
    smo.C = C;
    smo.y = detail::signed_targets(index);
    smo.alpha.assign(n, 0.0);
    smo.u.assign(n, 0.0);
    smo.K.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sq = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                double diff = dense[i][d] - dense[j][d];
                sq += diff * diff;
            }
            double k = std::exp(-gamma * sq);
            smo.K[i][j] = k;
            smo.K[j][i] = k;
        }
    }

    // Alternate full sweeps with sweeps over the non-bound set; stop once a
    // full sweep changes nothing, i.e. every example satisfies the KKT
    // conditions within the tolerance.
    bool examine_all = true;
    std::size_t changed = 1;
    constexpr std::size_t kMaxPasses = 100000;
    std::size_t passes = 0;
    while (changed > 0 || examine_all) {
        if (++passes > kMaxPasses) {
            std::ostringstream msg;
            msg << "SMO failed to reach the KKT tolerance after " << kMaxPasses
                << " passes (n=" << n << ", C=" << C << ", gamma=" << gamma
                << ")";
            throw InternalError(msg.str());
        }
        changed = 0;
        if (examine_all) {
            for (std::size_t i = 0; i < n; ++i) changed += smo.examine(i) ? 1 : 0;
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                if (smo.alpha[i] > 0.0 && smo.alpha[i] < C) {
                    changed += smo.examine(i) ? 1 : 0;
                }
            }
        }
        if (examine_all) {
            examine_all = false;
        } else if (changed == 0) {
            examine_all = true;
        }
    }

    FittedSvcRbf fitted;
    fitted.classes = std::move(index.classes);
    fitted.gamma = gamma;
    fitted.bias = smo.b;
    for (std::size_t i = 0; i < n; ++i) {
        if (smo.alpha[i] > 0.0) {
            fitted.support_vectors.push_back(dense[i]);
            fitted.dual_coef.push_back(smo.alpha[i] * smo.y[i]);
        }
    }
    return fitted;
}

}  // namespace ttpc
