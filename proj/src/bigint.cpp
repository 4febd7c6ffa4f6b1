#include "vass/bigint.hpp"

#include "vass/error.hpp"

#include <algorithm>

namespace vass {

Int parse_int(const std::string& text) {
    std::string body = text;
    if (!body.empty() && body[0] == '+') body.erase(0, 1);
    std::size_t start = (!body.empty() && body[0] == '-') ? 1 : 0;
    if (body.size() == start ||
        !std::all_of(body.begin() + static_cast<std::ptrdiff_t>(start), body.end(),
                     [](char c) { return c >= '0' && c <= '9'; })) {
        throw Error(Errc::SchemaError, "not a decimal integer: '" + text + "'");
    }
    return Int(body, 10);
}

std::string to_string(const Int& value) { return value.get_str(10); }

Vec zeros(std::size_t dim) { return Vec(dim, Int(0)); }

Vec add(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw Error(Errc::DimensionMismatch, "vector lengths differ");
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

Vec sub(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw Error(Errc::DimensionMismatch, "vector lengths differ");
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

Vec scale(const Vec& a, const Int& factor) {
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * factor;
    return out;
}

Vec negate(const Vec& a) {
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = -a[i];
    return out;
}

Int norm1(const Vec& a) {
    Int total = 0;
    for (const auto& x : a) total += abs(x);
    return total;
}

Int norm_inf(const Vec& a) {
    Int best = 0;
    for (const auto& x : a) {
        Int m = abs(x);
        if (m > best) best = m;
    }
    return best;
}

bool nonnegative(const Vec& a) {
    return std::all_of(a.begin(), a.end(), [](const Int& x) { return sgn(x) >= 0; });
}

bool leq(const Vec& a, const Vec& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

std::string to_string(const Vec& a) {
    std::string out = "(";
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) out += ",";
        out += a[i].get_str();
    }
    return out + ")";
}

std::size_t IntHash::operator()(const Int& value) const noexcept {
    const mpz_srcptr z = value.get_mpz_t();
    std::size_t h = static_cast<std::size_t>(z->_mp_size) * 0x9e3779b97f4a7c15ULL;
    int limbs = z->_mp_size < 0 ? -z->_mp_size : z->_mp_size;
    for (int i = 0; i < limbs; ++i) {
        h ^= static_cast<std::size_t>(z->_mp_d[i]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

std::size_t VecHash::operator()(const Vec& v) const noexcept {
    IntHash ih;
    std::size_t h = v.size();
    for (const auto& x : v) h ^= ih(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

}  // namespace vass
