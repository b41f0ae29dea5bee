#pragma once

// Minimal linear-programming layer: a model builder plus a dense two-phase
// primal simplex. All models built in this library are small pure LPs
// (maximization, no integrality), so a dense tableau is adequate.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "persuade/errors.hpp"

namespace persuade::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { le, ge, eq };
enum class Status { optimal, infeasible, unbounded, numerical_failure };

inline const char* to_string(Status s) {
    switch (s) {
        case Status::optimal: return "optimal";
        case Status::infeasible: return "infeasible";
        case Status::unbounded: return "unbounded";
        case Status::numerical_failure: return "numerical-failure";
    }
    return "?";
}

struct Term {
    int var;
    double coef;
};

struct Variable {
    std::string name;
    double lo;
    double hi;
};

struct Constraint {
    std::string name;
    std::vector<Term> terms;
    Sense sense;
    double rhs;
};

class LpModel {
public:
    int add_variable(std::string name, double lo = 0.0, double hi = kInf) {
        if (lo > hi) throw InputError("variable '" + name + "' has lo > hi");
        vars_.push_back({std::move(name), lo, hi});
        objective_.push_back(0.0);
        return static_cast<int>(vars_.size()) - 1;
    }

    void add_constraint(std::vector<Term> terms, Sense sense, double rhs, std::string name = {}) {
        for (const auto& t : terms)
            if (t.var < 0 || static_cast<std::size_t>(t.var) >= vars_.size())
                throw InputError("constraint references undeclared variable");
        if (name.empty()) name = "c" + std::to_string(cons_.size());
        cons_.push_back({std::move(name), std::move(terms), sense, rhs});
    }

    /// Objective sense is always maximize.
    void set_objective_coef(int var, double coef) { objective_.at(static_cast<std::size_t>(var)) = coef; }
    void add_objective_coef(int var, double coef) { objective_.at(static_cast<std::size_t>(var)) += coef; }

    std::size_t num_variables() const { return vars_.size(); }
    std::size_t num_constraints() const { return cons_.size(); }
    const std::vector<Variable>& variables() const { return vars_; }
    const std::vector<Constraint>& constraints() const { return cons_; }
    const std::vector<double>& objective() const { return objective_; }

    double objective_value(const std::vector<double>& x) const {
        double v = 0.0;
        for (std::size_t j = 0; j < vars_.size(); ++j) v += objective_[j] * x[j];
        return v;
    }

    /// Largest bound or constraint violation of an assignment.
    double max_violation(const std::vector<double>& x) const {
        double worst = 0.0;
        for (std::size_t j = 0; j < vars_.size(); ++j) {
            worst = std::max(worst, vars_[j].lo - x[j]);
            worst = std::max(worst, x[j] - vars_[j].hi);
        }
        for (const auto& c : cons_) {
            double lhs = 0.0;
            for (const auto& t : c.terms) lhs += t.coef * x[static_cast<std::size_t>(t.var)];
            switch (c.sense) {
                case Sense::le: worst = std::max(worst, lhs - c.rhs); break;
                case Sense::ge: worst = std::max(worst, c.rhs - lhs); break;
                case Sense::eq: worst = std::max(worst, std::abs(lhs - c.rhs)); break;
            }
        }
        return worst;
    }

    /// Human-readable dump in a CPLEX-LP-like text format (see README).
    std::string to_lp_text() const {
        std::ostringstream os;
        os << "\\ persuade-lp format_version 1\n";
        os << "Maximize\n obj:";
        for (std::size_t j = 0; j < vars_.size(); ++j)
            if (objective_[j] != 0.0) os << ' ' << signed_num(objective_[j]) << ' ' << vars_[j].name;
        os << "\nSubject To\n";
        for (const auto& c : cons_) {
            os << ' ' << c.name << ':';
            for (const auto& t : c.terms)
                os << ' ' << signed_num(t.coef) << ' ' << vars_[static_cast<std::size_t>(t.var)].name;
            os << (c.sense == Sense::le ? " <= " : c.sense == Sense::ge ? " >= " : " = ")
               << num(c.rhs) << '\n';
        }
        os << "Bounds\n";
        for (const auto& v : vars_) {
            if (v.lo == -kInf && v.hi == kInf)
                os << ' ' << v.name << " free\n";
            else
                os << ' ' << (v.lo == -kInf ? std::string("-inf") : num(v.lo)) << " <= " << v.name
                   << " <= " << (v.hi == kInf ? std::string("+inf") : num(v.hi)) << '\n';
        }
        os << "End\n";
        return os.str();
    }

private:
    static std::string num(double x) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return buf;
    }
    static std::string signed_num(double x) { return (x >= 0 ? "+" : "") + num(x); }

    std::vector<Variable> vars_;
    std::vector<Constraint> cons_;
    std::vector<double> objective_;
};

struct LpSolution {
    Status status = Status::numerical_failure;
    double objective = 0.0;
    std::vector<double> x;
    long iterations = 0;
    double max_violation = 0.0;
    std::string message;

    bool optimal() const { return status == Status::optimal; }
};

struct SimplexOptions {
    long max_iterations = 500000;
    double pivot_tol = 1e-9;
    double optimality_tol = 1e-10;
    double feasibility_tol = 1e-7;
    /// Slack allowed in the first pass of the two-pass ratio test.
    double ratio_slack = 1e-9;
    int degenerate_before_bland = 50;
    /// Rebuild the tableau from the original rows at least this often.
    int refactor_interval = 16;
};

namespace detail {

/// Dense tableau simplex over nonnegative columns. Keeps the original rows so
/// the working tableau can be rebuilt from the basis to shed round-off.
class DenseSimplex {
public:
    DenseSimplex(std::size_t rows, std::size_t cols)
        : m_(rows), n_(cols), orig_(rows * (cols + 1), 0.0), t_((rows + 1) * (cols + 1), 0.0),
          basis_(rows, 0), cost_(cols, 0.0), allowed_(cols, 1) {}

    double& coef(std::size_t i, std::size_t j) { return orig_[i * (n_ + 1) + j]; }
    double& rhs0(std::size_t i) { return orig_[i * (n_ + 1) + n_]; }
    std::vector<std::size_t>& basis() { return basis_; }
    std::vector<double>& cost() { return cost_; }
    std::vector<char>& allowed() { return allowed_; }

    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }
    double at(std::size_t i, std::size_t j) const { return t_[i * (n_ + 1) + j]; }
    double rhs(std::size_t i) const { return at(i, n_); }

    /// Recompute B^-1 [A | b] and the reduced-cost row from scratch.
    /// Returns false when the basis matrix is numerically singular.
    bool refactor() {
        const std::size_t w = n_ + 1;
        std::vector<double> bm(m_ * m_);
        for (std::size_t i = 0; i < m_; ++i)
            for (std::size_t k = 0; k < m_; ++k) bm[i * m_ + k] = orig_[i * w + basis_[k]];
        std::vector<double> work(orig_.begin(), orig_.end());
        for (std::size_t k = 0; k < m_; ++k) {
            std::size_t p = k;
            for (std::size_t i = k + 1; i < m_; ++i)
                if (std::abs(bm[i * m_ + k]) > std::abs(bm[p * m_ + k])) p = i;
            if (std::abs(bm[p * m_ + k]) < 1e-12) return false;
            if (p != k) {
                std::swap_ranges(bm.begin() + static_cast<std::ptrdiff_t>(p * m_),
                                 bm.begin() + static_cast<std::ptrdiff_t>((p + 1) * m_),
                                 bm.begin() + static_cast<std::ptrdiff_t>(k * m_));
                std::swap_ranges(work.begin() + static_cast<std::ptrdiff_t>(p * w),
                                 work.begin() + static_cast<std::ptrdiff_t>((p + 1) * w),
                                 work.begin() + static_cast<std::ptrdiff_t>(k * w));
            }
            const double inv = 1.0 / bm[k * m_ + k];
            for (std::size_t c = 0; c < m_; ++c) bm[k * m_ + c] *= inv;
            for (std::size_t j = 0; j < w; ++j) work[k * w + j] *= inv;
            for (std::size_t i = 0; i < m_; ++i) {
                if (i == k) continue;
                const double f = bm[i * m_ + k];
                if (f == 0.0) continue;
                for (std::size_t c = 0; c < m_; ++c) bm[i * m_ + c] -= f * bm[k * m_ + c];
                for (std::size_t j = 0; j < w; ++j) work[i * w + j] -= f * work[k * w + j];
            }
        }
        std::copy(work.begin(), work.end(), t_.begin());
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t k = 0; k < m_; ++k) t_[i * w + basis_[k]] = (i == k) ? 1.0 : 0.0;
            if (std::abs(t_[i * w + n_]) < 1e-13) t_[i * w + n_] = 0.0;
        }
        double* z = &t_[m_ * w];
        for (std::size_t j = 0; j < n_; ++j) z[j] = cost_[j];
        z[n_] = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = cost_[basis_[i]];
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j < w; ++j) z[j] -= cb * t_[i * w + j];
        }
        for (std::size_t i = 0; i < m_; ++i) z[basis_[i]] = 0.0;
        since_refactor_ = 0;
        return true;
    }

    void pivot(std::size_t r, std::size_t c) {
        const std::size_t w = n_ + 1;
        double* pr = &t_[r * w];
        const double inv = 1.0 / pr[c];
        for (std::size_t j = 0; j <= n_; ++j) pr[j] *= inv;
        pr[c] = 1.0;
        for (std::size_t i = 0; i <= m_; ++i) {
            if (i == r) continue;
            double* pi = &t_[i * w];
            const double f = pi[c];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= n_; ++j) pi[j] -= f * pr[j];
            pi[c] = 0.0;
        }
        basis_[r] = c;
        ++since_refactor_;
    }

    void drop_row(std::size_t r) {
        const std::size_t w = n_ + 1;
        orig_.erase(orig_.begin() + static_cast<std::ptrdiff_t>(r * w),
                    orig_.begin() + static_cast<std::ptrdiff_t>((r + 1) * w));
        t_.erase(t_.begin() + static_cast<std::ptrdiff_t>(r * w), t_.begin() + static_cast<std::ptrdiff_t>((r + 1) * w));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
        --m_;
    }

    enum class Result { optimal, unbounded, iteration_limit, singular };

    Result run(const SimplexOptions& opt, long& iterations) {
        if (!refactor()) return Result::singular;
        const auto interval = static_cast<std::size_t>(std::max(1, opt.refactor_interval));
        int degenerate = 0;
        while (true) {
            if (iterations >= opt.max_iterations) return Result::iteration_limit;
            if (since_refactor_ >= interval && !refactor()) return Result::singular;
            const bool bland = degenerate >= opt.degenerate_before_bland;
            std::size_t enter = pick_entering(opt, bland);
            if (enter == n_ && since_refactor_ > 0) {
                // confirm optimality on a fresh tableau
                if (!refactor()) return Result::singular;
                enter = pick_entering(opt, bland);
            }
            if (enter == n_) return Result::optimal;

            const std::size_t leave = pick_leaving(enter, opt, bland);
            if (leave == m_) {
                if (since_refactor_ > 0) {
                    if (!refactor()) return Result::singular;
                    continue;
                }
                return Result::unbounded;
            }
            const double step = std::max(0.0, rhs(leave)) / at(leave, enter);
            degenerate = step <= 1e-12 ? degenerate + 1 : 0;
            pivot(leave, enter);
            ++iterations;
        }
    }

private:
    std::size_t pick_entering(const SimplexOptions& opt, bool bland) const {
        std::size_t enter = n_;
        double best = opt.optimality_tol;
        const double* z = &t_[m_ * (n_ + 1)];
        for (std::size_t j = 0; j < n_; ++j) {
            if (!allowed_[j] || z[j] <= best) continue;
            enter = j;
            if (bland) break;
            best = z[j];
        }
        return enter;
    }

    // Two-pass (Harris) ratio test: bound the step with a small slack, then
    // take the largest pivot among rows within that bound. Under Bland's rule
    // ties on the exact minimum ratio go to the smallest basic index.
    std::size_t pick_leaving(std::size_t enter, const SimplexOptions& opt, bool bland) const {
        double limit = kInf;
        for (std::size_t i = 0; i < m_; ++i) {
            const double a = at(i, enter);
            if (a > opt.pivot_tol) limit = std::min(limit, (std::max(0.0, rhs(i)) + opt.ratio_slack) / a);
        }
        if (limit == kInf) return m_;
        std::size_t leave = m_;
        double best_piv = 0.0, best_ratio = kInf;
        for (std::size_t i = 0; i < m_; ++i) {
            const double a = at(i, enter);
            if (a <= opt.pivot_tol) continue;
            const double ratio = std::max(0.0, rhs(i)) / a;
            if (ratio > limit) continue;
            if (bland) {
                const double slack = 1e-12 * std::max(1.0, best_ratio);
                if (leave == m_ || ratio < best_ratio - slack ||
                    (ratio <= best_ratio + slack && basis_[i] < basis_[leave])) {
                    leave = i;
                    best_ratio = std::min(best_ratio, ratio);
                }
            } else if (a > best_piv) {
                leave = i;
                best_piv = a;
            }
        }
        return leave;
    }

    std::size_t m_, n_;
    std::vector<double> orig_;
    std::vector<double> t_;
    std::vector<std::size_t> basis_;
    std::vector<double> cost_;
    std::vector<char> allowed_;
    std::size_t since_refactor_ = 0;
};

}  // namespace detail

namespace detail {

inline LpSolution solve_once(const LpModel& model, const SimplexOptions& opt) {
    using detail::DenseSimplex;
    const auto& vars = model.variables();
    const std::size_t nv = vars.size();

    // x_j = offset + sign * y_pos (- y_neg for free variables); y >= 0.
    struct Map {
        double offset = 0.0;
        double sign = 1.0;
        long pos = -1;
        long neg = -1;
    };
    std::vector<Map> map(nv);
    std::size_t ny = 0;
    struct Row {
        std::vector<std::pair<std::size_t, double>> terms;
        Sense sense;
        double rhs;
    };
    std::vector<Row> rows;
    for (std::size_t j = 0; j < nv; ++j) {
        const auto& v = vars[j];
        if (v.lo > -kInf) {
            map[j] = {v.lo, 1.0, static_cast<long>(ny++), -1};
            if (v.hi < kInf) rows.push_back({{{static_cast<std::size_t>(map[j].pos), 1.0}}, Sense::le, v.hi - v.lo});
        } else if (v.hi < kInf) {
            map[j] = {v.hi, -1.0, static_cast<long>(ny++), -1};
        } else {
            map[j] = {0.0, 1.0, static_cast<long>(ny), static_cast<long>(ny + 1)};
            ny += 2;
        }
    }
    for (const auto& c : model.constraints()) {
        Row row{{}, c.sense, c.rhs};
        for (const auto& t : c.terms) {
            const Map& mj = map[static_cast<std::size_t>(t.var)];
            row.rhs -= t.coef * mj.offset;
            row.terms.emplace_back(static_cast<std::size_t>(mj.pos), t.coef * mj.sign);
            if (mj.neg >= 0) row.terms.emplace_back(static_cast<std::size_t>(mj.neg), -t.coef);
        }
        rows.push_back(std::move(row));
    }
    for (auto& r : rows) {
        if (r.rhs < 0.0) {
            r.rhs = -r.rhs;
            for (auto& t : r.terms) t.second = -t.second;
            if (r.sense == Sense::le)
                r.sense = Sense::ge;
            else if (r.sense == Sense::ge)
                r.sense = Sense::le;
        }
    }

    std::size_t n_slack = 0, n_art = 0;
    for (const auto& r : rows) {
        if (r.sense != Sense::eq) ++n_slack;
        if (r.sense != Sense::le) ++n_art;
    }
    const std::size_t m = rows.size();
    const std::size_t art_begin = ny + n_slack;
    DenseSimplex sx(m, ny + n_slack + n_art);
    std::vector<char> is_art(sx.cols(), 0);
    {
        std::size_t s = ny, a = art_begin;
        for (std::size_t i = 0; i < m; ++i) {
            for (const auto& [col, coef] : rows[i].terms) sx.coef(i, col) += coef;
            sx.rhs0(i) = rows[i].rhs;
            if (rows[i].sense == Sense::le) {
                sx.coef(i, s) = 1.0;
                sx.basis()[i] = s++;
            } else {
                if (rows[i].sense == Sense::ge) sx.coef(i, s++) = -1.0;
                sx.coef(i, a) = 1.0;
                is_art[a] = 1;
                sx.basis()[i] = a++;
            }
        }
    }

    LpSolution sol;
    long iters = 0;
    auto fail = [&](const char* what) {
        sol.status = Status::numerical_failure;
        sol.message = what;
        sol.iterations = iters;
        return sol;
    };

    // Phase 1: maximize -sum(artificials).
    if (n_art > 0) {
        for (std::size_t j = 0; j < sx.cols(); ++j) sx.cost()[j] = is_art[j] ? -1.0 : 0.0;
        const auto res = sx.run(opt, iters);
        if (res == DenseSimplex::Result::iteration_limit) return fail("iteration limit in phase 1");
        if (res == DenseSimplex::Result::singular) return fail("singular basis in phase 1");
        double infeas = 0.0;
        for (std::size_t i = 0; i < sx.rows(); ++i)
            if (is_art[sx.basis()[i]]) infeas += std::max(0.0, sx.rhs(i));
        if (infeas > opt.feasibility_tol) {
            sol.status = Status::infeasible;
            sol.message = "phase 1 residual " + format_real(infeas);
            sol.iterations = iters;
            return sol;
        }
        // Drive remaining zero-level artificials out; drop redundant rows.
        for (std::size_t i = 0; i < sx.rows();) {
            if (!is_art[sx.basis()[i]]) {
                ++i;
                continue;
            }
            std::size_t col = sx.cols();
            double big = 1e-7;
            for (std::size_t j = 0; j < art_begin; ++j)
                if (std::abs(sx.at(i, j)) > big) {
                    big = std::abs(sx.at(i, j));
                    col = j;
                }
            if (col < sx.cols()) {
                sx.pivot(i, col);
                ++i;
            } else {
                sx.drop_row(i);
            }
        }
    }

    // Phase 2.
    std::fill(sx.cost().begin(), sx.cost().end(), 0.0);
    for (std::size_t j = 0; j < nv; ++j) {
        const double c = model.objective()[j];
        sx.cost()[static_cast<std::size_t>(map[j].pos)] += c * map[j].sign;
        if (map[j].neg >= 0) sx.cost()[static_cast<std::size_t>(map[j].neg)] -= c;
    }
    for (std::size_t j = 0; j < sx.cols(); ++j)
        if (is_art[j]) sx.allowed()[j] = 0;
    const auto res = sx.run(opt, iters);
    sol.iterations = iters;
    if (res == DenseSimplex::Result::iteration_limit) return fail("iteration limit in phase 2");
    if (res == DenseSimplex::Result::singular) return fail("singular basis in phase 2");
    if (res == DenseSimplex::Result::unbounded) {
        sol.status = Status::unbounded;
        return sol;
    }

    std::vector<double> y(sx.cols(), 0.0);
    for (std::size_t i = 0; i < sx.rows(); ++i) y[sx.basis()[i]] = std::max(0.0, sx.rhs(i));
    sol.x.assign(nv, 0.0);
    for (std::size_t j = 0; j < nv; ++j) {
        double x = map[j].offset + map[j].sign * y[static_cast<std::size_t>(map[j].pos)];
        if (map[j].neg >= 0) x -= y[static_cast<std::size_t>(map[j].neg)];
        // snap round-off back into the box
        if (x < vars[j].lo && x > vars[j].lo - 1e-9) x = vars[j].lo;
        if (x > vars[j].hi && x < vars[j].hi + 1e-9) x = vars[j].hi;
        sol.x[j] = x;
    }
    sol.objective = model.objective_value(sol.x);
    sol.max_violation = model.max_violation(sol.x);
    if (sol.max_violation > opt.feasibility_tol) {
        sol.status = Status::numerical_failure;
        sol.message = "primal violation " + format_real(sol.max_violation);
        return sol;
    }
    sol.status = Status::optimal;
    return sol;
}

}  // namespace detail

/// Solve `max c^T x` over the model. Infeasible or unbounded models are
/// reported through the status, never by throwing. A numerical failure is
/// retried with more frequent refactorization and a stricter pivot floor.
inline LpSolution solve_lp(const LpModel& model, const SimplexOptions& opt = {}) {
    LpSolution sol = detail::solve_once(model, opt);
    long total = sol.iterations;
    SimplexOptions retry = opt;
    for (int attempt = 0; attempt < 2 && sol.status == Status::numerical_failure; ++attempt) {
        retry.refactor_interval = std::max(1, retry.refactor_interval / 4);
        retry.pivot_tol = std::max(retry.pivot_tol * 100.0, 1e-7);
        sol = detail::solve_once(model, retry);
        total += sol.iterations;
    }
    sol.iterations = total;
    return sol;
}

}  // namespace persuade::lp
