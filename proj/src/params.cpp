#include "rvehom/params.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rvehom {

Rational Rational::normalized() const {
    if (den == 0) throw std::invalid_argument("rational: zero denominator");
    long long n = num, d = den;
    if (d < 0) { n = -n; d = -d; }
    const long long g = std::gcd(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
    return {n, d};
}

std::string Rational::str() const {
    const Rational r = normalized();
    if (r.den == 1) return std::to_string(r.num);
    return std::to_string(r.num) + "/" + std::to_string(r.den);
}

Rational Rational::parse(const std::string& text) {
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const long long n = std::stoll(text.substr(0, slash));
        const long long d = std::stoll(text.substr(slash + 1));
        return Rational{n, d}.normalized();
    }
    const auto dot = text.find('.');
    if (dot == std::string::npos) return Rational{std::stoll(text), 1};
    const std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    long long den = 1;
    for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
    return Rational{std::stoll(digits), den}.normalized();
}

int EnsembleParams::inclusion_cells() const {
    const Rational a = alpha.normalized();
    return int((2 * a.num * m0) / a.den);
}

void EnsembleParams::validate() const {
    if (L < 1) throw std::invalid_argument("params: L must be >= 1");
    if (m0 < 2 || (m0 & (m0 - 1)) != 0)
        throw std::invalid_argument("params: m0 must be a power of two >= 2");
    const Rational a = alpha.normalized();
    if (a.num <= 0 || 2 * a.num > a.den)
        throw std::invalid_argument("params: alpha must lie in (0, 1/2]");
    if ((a.num * static_cast<long long>(m0)) % a.den != 0)
        throw std::invalid_argument("params: alpha*m0 must be an integer (grid-aligned inclusions)");
    if (!(lambda > 0.0) || lambda > 1.0)
        throw std::invalid_argument("params: lambda must lie in (0, 1]");
    if (!(tol > 0.0)) throw std::invalid_argument("params: tol must be positive");
}

} // namespace rvehom
