#pragma once

// LP encoding of  out <= min_{m<K} v_m / (K - m),  v_m = sum of the n-m
// smallest inputs. The inner "sum of the smallest w entries" is written in
// its dual form  v_m <= (n-m) t_m + sum_r z_{r,m},  x_r >= t_m + z_{r,m},
// z_{r,m} <= 0.  The sign bound on z is what makes v_m the sum of the
// smallest entries; without it every m >= 1 row is vacuous.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "persuade/lp.hpp"

namespace persuade {

inline void add_coverage_block(lp::LpModel& model, std::span<const int> inputs, int out, std::size_t k,
                               const std::string& prefix) {
    using lp::Sense;
    const std::size_t n = inputs.size();
    for (std::size_t m = 0; m < k; ++m) {
        const std::string tag = prefix + "_m" + std::to_string(m);
        const int v = model.add_variable("v_" + tag, -lp::kInf, lp::kInf);
        const int t = model.add_variable("t_" + tag, -lp::kInf, lp::kInf);
        model.add_constraint({{out, static_cast<double>(k - m)}, {v, -1.0}}, Sense::le, 0.0, "cov_" + tag);

        std::vector<lp::Term> sum{{v, 1.0}, {t, -static_cast<double>(n - m)}};
        for (std::size_t r = 0; r < n; ++r) {
            const int z = model.add_variable("z_" + tag + "_" + std::to_string(r), -lp::kInf, 0.0);
            sum.push_back({z, -1.0});
            model.add_constraint({{inputs[r], 1.0}, {t, -1.0}, {z, -1.0}}, Sense::ge, 0.0,
                                 "low_" + tag + "_" + std::to_string(r));
        }
        model.add_constraint(std::move(sum), Sense::le, 0.0, "sum_" + tag);
    }
}

}  // namespace persuade
