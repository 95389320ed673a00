#include "pdham/sym/zero_test.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace pdham::sym {

std::string ZeroVerdict::str() const {
    switch (decision) {
        case Decision::Zero: return probabilistic ? "zero (probabilistic)" : "zero";
        case Decision::Nonzero: return probabilistic ? "nonzero (numeric)" : "nonzero";
        case Decision::Unknown: break;
    }
    return "unknown";
}

ZeroVerdict is_zero(const Expr& e, const ZeroTestConfig& cfg) {
    if (e.is_zero()) return {Decision::Zero, false};
    if (!e.has_transcendental()) return {Decision::Nonzero, false};

    const auto atoms = free_atoms(e);
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> dist(0.25, 1.75);

    int accepted = 0;
    int attempts = 0;
    double worst = 0.0;
    while (accepted < cfg.samples && attempts < 4 * cfg.samples) {
        ++attempts;
        std::map<std::string, double> point;
        for (const auto& a : atoms) point[a->str()] = dist(rng);
        double v = 0.0;
        try {
            v = eval_numeric(e, point);
        } catch (const std::domain_error&) {
            continue;
        }
        if (!std::isfinite(v)) continue;
        ++accepted;
        worst = std::max(worst, std::abs(v));
        if (worst > cfg.nonzero_tolerance) return {Decision::Nonzero, true};
    }
    if (accepted < cfg.samples) return {Decision::Unknown, true};
    if (worst < cfg.zero_tolerance) return {Decision::Zero, true};
    return {Decision::Unknown, true};
}

}  // namespace pdham::sym
