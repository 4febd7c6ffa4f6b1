#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace vass {

using Int = mpz_class;
using Rat = mpq_class;
using Vec = std::vector<Int>;

Int parse_int(const std::string& text);
std::string to_string(const Int& value);

Vec zeros(std::size_t dim);
Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scale(const Vec& a, const Int& factor);
Vec negate(const Vec& a);
Int norm1(const Vec& a);
Int norm_inf(const Vec& a);
bool nonnegative(const Vec& a);
bool leq(const Vec& a, const Vec& b);
std::string to_string(const Vec& a);

struct IntHash {
    std::size_t operator()(const Int& value) const noexcept;
};

struct VecHash {
    std::size_t operator()(const Vec& v) const noexcept;
};

}  // namespace vass
