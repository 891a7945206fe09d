#include "pwa/bench.hpp"

#include <cmath>

#include "pwa/errors.hpp"

namespace pwa {

double eggholder_1d(double x) {
    return -47.0 * std::sin(std::sqrt(std::abs(x / 2.0 + 47.0))) -
           x * std::sin(std::sqrt(std::abs(x - 47.0)));
}

double nmpc_objective(double u1, double u2) {
    const double pi = 3.14159265358979323846;
    const double heading = 0.02 * u1 + pi;
    return std::sqrt(heading * heading + 2.0 * pi * pi) +
           0.02 * std::sqrt(u1 * u1 + (u1 + u2) * (u1 + u2)) +
           0.01 * std::sqrt(u1 * u1 + u2 * u2);
}

const std::vector<Benchmark>& benchmarks() {
    static const std::vector<Benchmark> regs = [] {
        std::vector<Benchmark> v;
        v.push_back({"eggholder1d",
                     [](const Vec& x) {
                         if (x.size() != 1) throw DomainViolationError("eggholder1d expects a 1-D point");
                         if (x[0] < -512.0 - 1e-6 || x[0] > 512.0 + 1e-6)
                             throw DomainViolationError("eggholder1d domain is [-512, 512]");
                         return eggholder_1d(x[0]);
                     },
                     Polytope::interval(-512.0, 512.0)});
        v.push_back({"nmpc-theta0",
                     [](const Vec& x) {
                         if (x.size() != 2) throw DomainViolationError("nmpc-theta0 expects a 2-D point");
                         for (double c : x)
                             if (c < -20.0 - 1e-6 || c > 20.0 + 1e-6)
                                 throw DomainViolationError("nmpc-theta0 domain is [-20, 20]^2");
                         return nmpc_objective(x[0], x[1]);
                     },
                     Polytope::box({-20.0, -20.0}, {20.0, 20.0})});
        return v;
    }();
    return regs;
}

std::optional<Benchmark> find_benchmark(const std::string& name) {
    for (const Benchmark& b : benchmarks())
        if (b.name == name) return b;
    return std::nullopt;
}

}  // namespace pwa
