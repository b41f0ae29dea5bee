// Solve a generated three-district instance with semi-public signals and
// print a few coupled draws.

#include <cstdio>

#include "persuade/persuade.hpp"

int main() {
    using namespace persuade;
    const ElectionInstance inst = generate_instance({3, 3, 3, 7, InstanceFamily::threshold_adversarial});
    const auto rep = solve_semipublic(inst, 6, 0.05, 0.2);
    std::printf("semi-public value %.6f over %zu grid points\n", rep.value, rep.grid_size);
    for (std::size_t s = 0; s < inst.num_states(); ++s)
        std::printf("  %s: win probability %.4f\n", inst.states()[s].c_str(), rep.scheme.aggregate_win_probs[s]);
    std::fputs(semipublic_trace_csv(inst, rep.scheme, 8, 42).c_str(), stdout);
}
