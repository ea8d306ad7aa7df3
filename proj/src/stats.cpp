#include "ads/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ads {

double entropy_bits(std::span<const double> probs) {
    double h = 0.0;
    for (double p : probs) {
        if (p > 0.0) h -= p * std::log2(p);
    }
    return h;
}

double tv_distance(std::span<const std::uint64_t> counts, std::span<const double> probs) {
    if (counts.size() != probs.size()) {
        throw std::invalid_argument("tv_distance: size mismatch");
    }
    std::uint64_t total = 0;
    for (std::uint64_t c : counts) total += c;
    if (total == 0) throw std::invalid_argument("tv_distance: no observations");
    double sum = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        sum += std::fabs(double(counts[i]) / double(total) - probs[i]);
    }
    return sum / 2.0;
}

namespace {

// Regularized lower incomplete gamma P(a,x) by series; Q by continued
// fraction. Standard Lentz / series split at x < a+1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_contfrac(a, x);
}

double chi_square_sf(double x, std::uint32_t dof) {
    if (dof == 0) return 1.0;
    return gamma_q(double(dof) / 2.0, x / 2.0);
}

ChiSquareResult chi_square_gof(std::span<const std::uint64_t> counts,
                               std::span<const double> probs) {
    if (counts.size() != probs.size()) {
        throw std::invalid_argument("chi_square_gof: size mismatch");
    }
    std::uint64_t total = 0;
    for (std::uint64_t c : counts) total += c;
    if (total == 0) throw std::invalid_argument("chi_square_gof: no observations");

    ChiSquareResult r;
    std::uint32_t bins = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double expected = probs[i] * double(total);
        if (expected <= 0.0) {
            if (counts[i] > 0) {
                return {std::numeric_limits<double>::infinity(), 0, 0.0};
            }
            continue;
        }
        const double diff = double(counts[i]) - expected;
        r.statistic += diff * diff / expected;
        ++bins;
    }
    r.dof = bins > 1 ? bins - 1 : 0;
    r.p_value = chi_square_sf(r.statistic, r.dof);
    return r;
}

ChiSquareResult chi_square_two_sample(std::span<const std::uint64_t> a,
                                      std::span<const std::uint64_t> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("chi_square_two_sample: size mismatch");
    }
    double total_a = 0.0, total_b = 0.0;
    for (std::uint64_t c : a) total_a += double(c);
    for (std::uint64_t c : b) total_b += double(c);
    if (total_a == 0.0 || total_b == 0.0) {
        throw std::invalid_argument("chi_square_two_sample: empty sample");
    }
    const double total = total_a + total_b;

    ChiSquareResult r;
    std::uint32_t bins = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double row = double(a[i]) + double(b[i]);
        if (row == 0.0) continue;
        const double ea = row * total_a / total;
        const double eb = row * total_b / total;
        const double da = double(a[i]) - ea;
        const double db = double(b[i]) - eb;
        r.statistic += da * da / ea + db * db / eb;
        ++bins;
    }
    r.dof = bins > 1 ? bins - 1 : 0;
    r.p_value = chi_square_sf(r.statistic, r.dof);
    return r;
}

double monobit_p_value(const BitString& bits) {
    if (bits.empty()) throw std::invalid_argument("monobit_p_value: empty input");
    std::int64_t s = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) s += bits.bit(i) ? 1 : -1;
    const double s_obs = std::fabs(double(s)) / std::sqrt(double(bits.size()));
    return std::erfc(s_obs / std::sqrt(2.0));
}

double runs_p_value(const BitString& bits) {
    const std::size_t n = bits.size();
    if (n < 2) throw std::invalid_argument("runs_p_value: too short");
    std::size_t ones = 0;
    for (std::size_t i = 0; i < n; ++i) ones += bits.bit(i);
    const double pi = double(ones) / double(n);
    // Prerequisite frequency check per SP 800-22; wildly biased input fails.
    if (std::fabs(pi - 0.5) >= 2.0 / std::sqrt(double(n))) return 0.0;
    std::size_t runs = 1;
    for (std::size_t i = 1; i < n; ++i) runs += bits.bit(i) != bits.bit(i - 1);
    const double num = std::fabs(double(runs) - 2.0 * double(n) * pi * (1.0 - pi));
    const double den = 2.0 * std::sqrt(2.0 * double(n)) * pi * (1.0 - pi);
    return std::erfc(num / den);
}

}  // namespace ads
