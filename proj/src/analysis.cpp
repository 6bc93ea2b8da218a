#include "homsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "homsim/parallel.hpp"

namespace homsim {

std::vector<CountRecord> synthesize_counts(const DipCurve& curve, double pair_rate_hz,
                                           double duration_per_point_s, std::uint64_t seed) {
    if (!(pair_rate_hz > 0.0) || !(duration_per_point_s > 0.0)) {
        throw std::invalid_argument("synthesize_counts: rate and duration must be positive");
    }
    std::mt19937_64 rng(seed);
    std::vector<CountRecord> records;
    records.reserve(curve.values.size());
    for (std::size_t i = 0; i < curve.values.size(); ++i) {
        const double mean = std::max(0.0, curve.values[i]) * pair_rate_hz * duration_per_point_s;
        long long counts = 0;
        if (mean > 0.0) {
            std::poisson_distribution<long long> poisson(mean);
            counts = poisson(rng);
        }
        records.push_back({curve.delays_fs[i], counts, duration_per_point_s});
    }
    return records;
}

namespace {

// Model and Jacobian for rate(x) = B * (1 - V * exp(-(x - c)^2 / w^2)).
struct GaussianModel {
    double baseline, visibility, center, width;

    double value(double x) const {
        const double u = (x - center) / width;
        return baseline * (1.0 - visibility * std::exp(-u * u));
    }

    std::array<double, 4> jacobian_row(double x) const {
        const double u = (x - center) / width;
        const double e = std::exp(-u * u);
        return {1.0 - visibility * e,                                      // d/dB
                -baseline * e,                                             // d/dV
                -baseline * visibility * e * 2.0 * (x - center) / (width * width),  // d/dc
                -baseline * visibility * e * 2.0 * (x - center) * (x - center) /
                    (width * width * width)};                              // d/dw
    }
};

double sum_squared_residuals(const GaussianModel& m, const std::vector<double>& xs,
                             const std::vector<double>& ys) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = m.value(xs[i]) - ys[i];
        ssr += r * r;
    }
    return ssr;
}

// Solves a 4x4 linear system in place by Gaussian elimination with partial
// pivoting; returns false when singular.
bool solve4(std::array<std::array<double, 4>, 4> a, std::array<double, 4> b,
            std::array<double, 4>& x) {
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 4; ++row) {
            if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
        }
        if (std::abs(a[pivot][col]) < 1e-300) return false;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (int row = col + 1; row < 4; ++row) {
            const double f = a[row][col] / a[col][col];
            for (int k = col; k < 4; ++k) a[row][k] -= f * a[col][k];
            b[row] -= f * b[col];
        }
    }
    for (int row = 3; row >= 0; --row) {
        double s = b[row];
        for (int k = row + 1; k < 4; ++k) s -= a[row][k] * x[k];
        x[row] = s / a[row][row];
    }
    return true;
}

bool invert4(const std::array<std::array<double, 4>, 4>& a, std::array<std::array<double, 4>, 4>& inv) {
    for (int col = 0; col < 4; ++col) {
        std::array<double, 4> e{};
        e[col] = 1.0;
        std::array<double, 4> x{};
        if (!solve4(a, e, x)) return false;
        for (int row = 0; row < 4; ++row) inv[row][col] = x[row];
    }
    return true;
}

}  // namespace

FitResult fit_gaussian(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    if (n != ys.size()) throw std::invalid_argument("fit_gaussian: size mismatch");
    if (n < 5) throw std::invalid_argument("fit_gaussian: need at least 5 points");

    const auto [lo_it, hi_it] = std::minmax_element(ys.begin(), ys.end());
    if (*lo_it == *hi_it) {
        throw FitError("fit_gaussian: degenerate data, all values equal");
    }

    // Initialization: baseline from the outer 20% of points, center at the
    // extremal point, width = half the scan range, V from min/max.
    const std::size_t edge = std::max<std::size_t>(1, n / 10);
    double baseline0 = 0.0;
    for (std::size_t i = 0; i < edge; ++i) baseline0 += ys[i] + ys[n - 1 - i];
    baseline0 /= static_cast<double>(2 * edge);
    if (baseline0 <= 0.0) {
        baseline0 = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(n);
    }
    if (baseline0 <= 0.0) throw FitError("fit_gaussian: baseline is not positive");

    std::size_t extremal = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(ys[i] - baseline0) > std::abs(ys[extremal] - baseline0)) extremal = i;
    }

    GaussianModel m{baseline0, (baseline0 - ys[extremal]) / baseline0, xs[extremal],
                    0.5 * (xs.back() - xs.front())};
    if (m.width <= 0.0) throw std::invalid_argument("fit_gaussian: x values must increase");

    constexpr int kMaxIterations = 200;
    constexpr double kStepTolerance = 1e-10;

    double ssr = sum_squared_residuals(m, xs, ys);
    GaussianModel best = m;
    double best_ssr = ssr;
    double lambda = 1e-3;
    bool converged = false;
    int iterations = 0;

    for (; iterations < kMaxIterations && !converged; ++iterations) {
        std::array<std::array<double, 4>, 4> normal{};
        std::array<double, 4> gradient{};
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = m.jacobian_row(xs[i]);
            const double r = m.value(xs[i]) - ys[i];
            for (int p = 0; p < 4; ++p) {
                gradient[p] += row[p] * r;
                for (int q = p; q < 4; ++q) normal[p][q] += row[p] * row[q];
            }
        }
        for (int p = 0; p < 4; ++p) {
            for (int q = 0; q < p; ++q) normal[p][q] = normal[q][p];
        }

        bool accepted = false;
        for (int attempt = 0; attempt < 50 && !accepted; ++attempt) {
            auto damped = normal;
            for (int p = 0; p < 4; ++p) {
                damped[p][p] += lambda * std::max(normal[p][p], 1e-12);
            }
            std::array<double, 4> step{};
            std::array<double, 4> rhs{-gradient[0], -gradient[1], -gradient[2], -gradient[3]};
            if (!solve4(damped, rhs, step)) {
                lambda *= 10.0;
                continue;
            }
            GaussianModel trial{m.baseline + step[0], m.visibility + step[1], m.center + step[2],
                                m.width + step[3]};
            if (trial.width == 0.0 || trial.baseline == 0.0) {
                lambda *= 10.0;
                continue;
            }
            const double trial_ssr = sum_squared_residuals(trial, xs, ys);
            if (trial_ssr <= ssr) {
                const double rel_step =
                    std::max({std::abs(step[0]) / (std::abs(m.baseline) + 1e-30),
                              std::abs(step[1]) / (std::abs(m.visibility) + 1.0),
                              std::abs(step[2]) / (std::abs(m.center) + std::abs(m.width)),
                              std::abs(step[3]) / std::abs(m.width)});
                m = trial;
                ssr = trial_ssr;
                lambda = std::max(lambda / 3.0, 1e-12);
                accepted = true;
                if (rel_step < kStepTolerance) converged = true;
            } else {
                lambda *= 10.0;
            }
        }
        if (!accepted) break;  // no downhill step found; keep best so far
        if (ssr < best_ssr) {
            best = m;
            best_ssr = ssr;
        }
    }

    // Canonicalize: the model is even in w.
    best.width = std::abs(best.width);

    FitResult fit;
    fit.baseline = best.baseline;
    fit.dip_depth = best.baseline * best.visibility;
    fit.center_fs = best.center;
    fit.width_fs = best.width;
    fit.visibility = best.visibility;
    fit.residual_norm = std::sqrt(best_ssr);
    fit.converged = converged;
    fit.iterations = iterations;

    // 1-sigma from the Gauss-Newton normal matrix at the optimum, scaled by
    // the residual variance.
    std::array<std::array<double, 4>, 4> normal{};
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = best.jacobian_row(xs[i]);
        for (int p = 0; p < 4; ++p) {
            for (int q = 0; q < 4; ++q) normal[p][q] += row[p] * row[q];
        }
    }
    std::array<std::array<double, 4>, 4> cov{};
    if (n > 4 && invert4(normal, cov)) {
        const double variance = best_ssr / static_cast<double>(n - 4);
        fit.visibility_sigma = std::sqrt(std::max(0.0, cov[1][1] * variance));
    } else {
        fit.visibility_sigma = std::numeric_limits<double>::infinity();
    }
    return fit;
}

FitResult fit_gaussian_dip(const std::vector<CountRecord>& data) {
    std::vector<double> xs, ys;
    xs.reserve(data.size());
    ys.reserve(data.size());
    for (const auto& rec : data) {
        if (rec.counts < 0 || !(rec.duration_s > 0.0)) {
            throw std::invalid_argument("fit_gaussian_dip: counts must be >= 0 with duration > 0");
        }
        xs.push_back(rec.delay_fs);
        ys.push_back(static_cast<double>(rec.counts) / rec.duration_s);
    }
    return fit_gaussian(xs, ys);
}

std::vector<double> sweep_delay_grid() {
    std::vector<double> delays;
    delays.reserve(121);
    for (int i = 0; i <= 120; ++i) delays.push_back(-600.0 + 10.0 * i);
    return delays;
}

std::vector<SweepPoint> visibility_sweep(double reflectivity, double transmissivity,
                                         const std::vector<Angle>& angles,
                                         const std::optional<SynthesisSettings>& noise) {
    if (angles.empty()) throw std::invalid_argument("visibility_sweep: no angles given");
    if (std::abs(reflectivity + transmissivity - 1.0) > 1e-9) {
        throw std::domain_error("visibility_sweep: R + T must equal 1");
    }

    const std::vector<double> delays = sweep_delay_grid();
    std::vector<SweepPoint> points(angles.size());
    parallel_for(angles.size(), [&](std::size_t i) {
        const ExperimentConfig config =
            make_aligned_experiment(reflectivity, angles[i], Angle::from_degrees(0.0));
        const DipCurve curve = dip_scan(config, delays);
        points[i].delta_theta = angles[i];
        try {
            if (noise) {
                const auto records = synthesize_counts(curve, noise->pair_rate_hz, noise->dwell_s,
                                                       noise->seed + i);
                points[i].fit = fit_gaussian_dip(records);
            } else {
                const auto [lo, hi] = std::minmax_element(curve.values.begin(), curve.values.end());
                if (*hi - *lo <= 1e-15 * std::max(1.0, *hi)) {
                    // Fully extinguished transmitted amplitude: flat curve,
                    // visibility 0 by definition.
                    points[i].fit.baseline = *hi;
                    points[i].fit.converged = true;
                } else {
                    points[i].fit = fit_gaussian(curve.delays_fs, curve.values);
                }
            }
        } catch (const FitError&) {
            points[i].fit = FitResult{};
        }
    });
    return points;
}

}  // namespace homsim
