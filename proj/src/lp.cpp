#include "vass/lp.hpp"

#include "vass/error.hpp"

#include <algorithm>
#include <numeric>

namespace vass::lp {

namespace {

// Phase-one simplex with Bland's rule on
//   G (xp - xn) - s = h,  xp, xn, s >= 0.
class Tableau {
public:
    Tableau(const std::vector<Row>& rows, std::size_t nvars) : nvars_(nvars), m_(rows.size()) {
        cols_ = 2 * nvars_ + m_ + m_;
        art_begin_ = 2 * nvars_ + m_;
        t_.assign(m_, std::vector<Rat>(cols_ + 1));
        basis_.assign(m_, 0);
        is_art_.assign(m_, false);
        for (std::size_t i = 0; i < m_; ++i) {
            bool flip = sgn(rows[i].rhs) > 0;
            Int sign = flip ? Int(1) : Int(-1);
            for (std::size_t j = 0; j < nvars_; ++j) {
                const Int& g = rows[i].coeffs[j];
                if (sgn(g) == 0) continue;
                t_[i][j] = sign * g;
                t_[i][nvars_ + j] = -sign * g;
            }
            t_[i][2 * nvars_ + i] = -sign;
            t_[i][cols_] = sign * rows[i].rhs;
            if (flip) {
                t_[i][art_begin_ + i] = 1;
                basis_[i] = art_begin_ + i;
                is_art_[i] = true;
            } else {
                basis_[i] = 2 * nvars_ + i;
            }
        }
    }

    bool solve() {
        for (;;) {
            std::size_t enter = cols_;
            for (std::size_t j = 0; j < art_begin_ && enter == cols_; ++j) {
                Rat z = 0;
                bool any = false;
                for (std::size_t i = 0; i < m_; ++i)
                    if (basis_[i] >= art_begin_ && sgn(t_[i][j]) != 0) {
                        z += t_[i][j];
                        any = true;
                    }
                if (any && sgn(z) > 0 && !is_basic(j)) enter = j;
            }
            if (enter == cols_) break;
            std::size_t leave = m_;
            Rat best;
            for (std::size_t i = 0; i < m_; ++i) {
                if (sgn(t_[i][enter]) <= 0) continue;
                Rat ratio = t_[i][cols_] / t_[i][enter];
                if (leave == m_ || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == m_) break;  // cannot happen for a bounded phase-one objective
            pivot(leave, enter);
        }
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] >= art_begin_ && sgn(t_[i][cols_]) != 0) return false;
        return true;
    }

    std::vector<Rat> point() const {
        std::vector<Rat> x(nvars_);
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < nvars_) x[basis_[i]] += t_[i][cols_];
            else if (basis_[i] < 2 * nvars_) x[basis_[i] - nvars_] -= t_[i][cols_];
        }
        return x;
    }

private:
    bool is_basic(std::size_t j) const { return std::find(basis_.begin(), basis_.end(), j) != basis_.end(); }

    void pivot(std::size_t r, std::size_t c) {
        Rat inv = 1 / t_[r][c];
        for (std::size_t j = 0; j <= cols_; ++j)
            if (sgn(t_[r][j]) != 0) t_[r][j] *= inv;
        std::vector<std::size_t> nz;
        for (std::size_t j = 0; j <= cols_; ++j)
            if (sgn(t_[r][j]) != 0) nz.push_back(j);
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r || sgn(t_[i][c]) == 0) continue;
            Rat f = t_[i][c];
            for (auto j : nz) t_[i][j] -= f * t_[r][j];
        }
        basis_[r] = c;
    }

    std::size_t nvars_, m_, cols_ = 0, art_begin_ = 0;
    std::vector<std::vector<Rat>> t_;
    std::vector<std::size_t> basis_;
    std::vector<bool> is_art_;
};

Int floor_rat(const Rat& q) {
    Int out;
    mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return out;
}

Int ceil_rat(const Rat& q) {
    Int out;
    mpz_cdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return out;
}

bool satisfies(const std::vector<Row>& rows, const Vec& x) {
    for (const auto& row : rows) {
        Int lhs = 0;
        for (std::size_t j = 0; j < x.size(); ++j)
            if (sgn(row.coeffs[j]) != 0) lhs += row.coeffs[j] * x[j];
        if (lhs < row.rhs) return false;
    }
    return true;
}

Row bound_row(std::size_t nvars, std::size_t j, bool lower, const Int& value) {
    Row r{zeros(nvars), lower ? value : Int(-value)};
    r.coeffs[j] = lower ? 1 : -1;
    return r;
}

Int determinant(std::vector<Vec> a) {
    const std::size_t n = a.size();
    Int prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k < n; ++k) {
        if (sgn(a[k][k]) == 0) {
            std::size_t p = k + 1;
            while (p < n && sgn(a[p][k]) == 0) ++p;
            if (p == n) return 0;
            std::swap(a[k], a[p]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                a[i][j] = a[i][j] * a[k][k] - a[i][k] * a[k][j];
                mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
            }
        }
        prev = a[k][k];
    }
    return sign * a[n - 1][n - 1];
}

template <class F>
void for_each_subset(std::size_t n, std::size_t size, F&& f) {
    std::vector<std::size_t> idx(size);
    std::iota(idx.begin(), idx.end(), 0);
    for (;;) {
        f(idx);
        std::size_t i = size;
        while (i > 0 && idx[i - 1] == n - size + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
}

double choose(std::size_t n, std::size_t k) {
    double out = 1;
    for (std::size_t i = 0; i < k; ++i) out = out * double(n - i) / double(i + 1);
    return out;
}

// Largest absolute subdeterminant, or nothing when there are too many minors.
std::optional<Int> max_subdeterminant(const std::vector<Row>& rows, std::size_t nvars) {
    const std::size_t m = rows.size();
    double work = 0;
    for (std::size_t s = 1; s <= std::min(m, nvars); ++s) work += choose(m, s) * choose(nvars, s);
    if (work > 200000) return std::nullopt;
    Int best = 0;
    for (std::size_t s = 1; s <= std::min(m, nvars); ++s) {
        for_each_subset(m, s, [&](const std::vector<std::size_t>& ri) {
            for_each_subset(nvars, s, [&](const std::vector<std::size_t>& ci) {
                std::vector<Vec> sub(s, Vec(s));
                for (std::size_t a = 0; a < s; ++a)
                    for (std::size_t b = 0; b < s; ++b) sub[a][b] = rows[ri[a]].coeffs[ci[b]];
                Int d = abs(determinant(std::move(sub)));
                if (d > best) best = d;
            });
        });
    }
    return best;
}

}  // namespace

std::optional<std::vector<Rat>> feasible_point(const std::vector<Row>& rows, std::size_t nvars) {
    for (const auto& row : rows)
        if (row.coeffs.size() != nvars) throw Error(Errc::DimensionMismatch, "row length differs from variable count");
    if (rows.empty()) return std::vector<Rat>(nvars);
    Tableau tab(rows, nvars);
    if (!tab.solve()) return std::nullopt;
    return tab.point();
}

Int hadamard_bound(const std::vector<Row>& rows, std::size_t nvars) {
    std::vector<Int> norms;
    for (const auto& row : rows) {
        Int sq = 0;
        for (const auto& c : row.coeffs) sq += c * c;
        Int root = sqrt(sq);
        if (root * root < sq) root += 1;
        if (sgn(root) > 0) norms.push_back(root);
    }
    std::sort(norms.begin(), norms.end(), [](const Int& a, const Int& b) { return a > b; });
    Int prod = 1;
    for (std::size_t i = 0; i < std::min(nvars, norms.size()); ++i) prod *= norms[i];
    return prod;
}

IntResult integer_point(const std::vector<Row>& rows, std::size_t nvars, std::size_t node_budget) {
    IntResult result;
    if (nvars == 0) {
        result.status = satisfies(rows, {}) ? IntStatus::Feasible : IntStatus::Infeasible;
        return result;
    }
    // Divide each row by the gcd of its coefficients and round the bound up.
    // Integer points are unchanged; parity-type infeasibility becomes LP
    // infeasibility, which branching on single variables cannot detect.
    std::vector<Row> tight;
    for (const Row& row : rows) {
        Int g = 0;
        for (const Int& c : row.coeffs) g = gcd(g, c);
        if (sgn(g) == 0) {
            if (sgn(row.rhs) > 0) return result;
            continue;
        }
        Row r{row.coeffs, row.rhs};
        for (Int& c : r.coeffs) c /= g;
        mpz_cdiv_q(r.rhs.get_mpz_t(), row.rhs.get_mpz_t(), g.get_mpz_t());
        tight.push_back(std::move(r));
    }
    auto root = feasible_point(tight, nvars);
    result.nodes = 1;
    if (!root) return result;

    std::optional<Int> minor = max_subdeterminant(tight, nvars);
    Int radius = Int(static_cast<unsigned long>(nvars)) * (minor ? *minor : hadamard_bound(tight, nvars));
    Vec lo(nvars), hi(nvars);
    for (std::size_t j = 0; j < nvars; ++j) {
        lo[j] = floor_rat((*root)[j]) - radius;
        hi[j] = ceil_rat((*root)[j]) + radius;
    }

    struct Node {
        Vec lo, hi;
    };
    std::vector<Node> stack{{lo, hi}};
    while (!stack.empty()) {
        if (result.nodes >= node_budget) {
            result.status = IntStatus::BudgetExceeded;
            return result;
        }
        Node node = std::move(stack.back());
        stack.pop_back();
        std::vector<Row> sys = tight;
        for (std::size_t j = 0; j < nvars; ++j) {
            sys.push_back(bound_row(nvars, j, true, node.lo[j]));
            sys.push_back(bound_row(nvars, j, false, node.hi[j]));
        }
        ++result.nodes;
        auto x = feasible_point(sys, nvars);
        if (!x) continue;
        Vec rounded(nvars);
        std::size_t branch = nvars;
        Rat best_frac = 0;
        for (std::size_t j = 0; j < nvars; ++j) {
            Rat v = (*x)[j];
            Int f = floor_rat(v);
            Rat frac = v - Rat(f);
            rounded[j] = frac * 2 >= 1 ? Int(f + 1) : f;
            if (sgn(frac) != 0) {
                Rat dist = frac * 2 > 1 ? Rat(1 - frac) : frac;
                if (branch == nvars || dist > best_frac) {
                    branch = j;
                    best_frac = dist;
                }
            }
        }
        if (branch == nvars || satisfies(sys, rounded)) {
            result.status = IntStatus::Feasible;
            if (branch == nvars)
                for (std::size_t j = 0; j < nvars; ++j) rounded[j] = floor_rat((*x)[j]);
            result.point = rounded;
            return result;
        }
        Rat v = (*x)[branch];
        Int f = floor_rat(v);
        Node down = node, up = node;
        down.hi[branch] = f;
        up.lo[branch] = f + 1;
        bool up_first = (v - Rat(f)) * 2 >= 1;
        if (up_first) {
            stack.push_back(std::move(down));
            stack.push_back(std::move(up));
        } else {
            stack.push_back(std::move(up));
            stack.push_back(std::move(down));
        }
    }
    result.status = IntStatus::Infeasible;
    return result;
}

Lattice solve_integer_equalities(const std::vector<Vec>& matrix, const Vec& rhs, std::size_t nvars) {
    const std::size_t rows = matrix.size();
    std::vector<Vec> a = matrix;
    std::vector<Vec> u(nvars, zeros(nvars));  // u[row][col]
    for (std::size_t j = 0; j < nvars; ++j) u[j][j] = 1;

    auto col_op = [&](std::size_t p, std::size_t q, const Int& x, const Int& y, const Int& z, const Int& w) {
        // col p <- x*p + y*q ; col q <- z*p + w*q
        for (auto* mat : {&a, &u}) {
            for (auto& r : *mat) {
                Int np = x * r[p] + y * r[q];
                Int nq = z * r[p] + w * r[q];
                r[p] = std::move(np);
                r[q] = std::move(nq);
            }
        }
    };

    std::vector<std::size_t> pivot_col(rows, nvars);
    std::size_t next = 0;
    for (std::size_t r = 0; r < rows && next < nvars; ++r) {
        for (std::size_t q = next + 1; q < nvars; ++q) {
            if (sgn(a[r][q]) == 0) continue;
            Int g, x, y;
            mpz_gcdext(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t(), a[r][next].get_mpz_t(), a[r][q].get_mpz_t());
            Int pa = a[r][next] / g, qb = a[r][q] / g;
            col_op(next, q, x, y, Int(-qb), pa);
        }
        if (sgn(a[r][next]) != 0) {
            if (sgn(a[r][next]) < 0)
                for (auto* mat : {&a, &u})
                    for (auto& row : *mat) row[next] = -row[next];
            pivot_col[r] = next++;
        }
    }

    Lattice out;
    Vec y = zeros(nvars);
    for (std::size_t r = 0; r < rows; ++r) {
        Int acc = rhs[r];
        std::size_t pc = pivot_col[r];
        for (std::size_t c = 0; c < next; ++c)
            if (c != pc) acc -= a[r][c] * y[c];
        if (pc == nvars) {
            if (sgn(acc) != 0) return out;
            continue;
        }
        if (!mpz_divisible_p(acc.get_mpz_t(), a[r][pc].get_mpz_t())) return out;
        y[pc] = acc / a[r][pc];
    }
    out.solvable = true;
    out.base = zeros(nvars);
    for (std::size_t i = 0; i < nvars; ++i)
        for (std::size_t c = 0; c < next; ++c) out.base[i] += u[i][c] * y[c];
    for (std::size_t c = next; c < nvars; ++c) {
        Vec col(nvars);
        for (std::size_t i = 0; i < nvars; ++i) col[i] = u[i][c];
        out.kernel.push_back(std::move(col));
    }
    return out;
}

}  // namespace vass::lp
