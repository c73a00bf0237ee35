// Samples a correlated block-model pair, runs every matcher and prints the
// accuracy on the unrevealed vertices.
#include <iostream>

#include "sgm/sgm.hpp"

int main() {
    sgm::CsbmParams params;
    params.n = 300;
    params.a = 5.0;
    params.b = 1.0;
    params.s = 0.8;
    params.rng_seed = 42;

    const sgm::Instance inst = sgm::sample_instance(params, 0.85);
    const auto unrevealed = inst.unrevealed();
    std::cout << "n=" << inst.n() << " |U|=" << unrevealed.size() << " edges A=" << inst.A.edge_count()
              << " B=" << inst.B.edge_count() << '\n';

    for (sgm::Method m : sgm::all_methods) {
        const sgm::MatchResult r = sgm::run_matcher(m, inst.A, inst.B, inst.seeds);
        std::cout << sgm::to_string(m) << ": accuracy " << sgm::accuracy(r.pi_hat, inst.pi_star, unrevealed) << " in "
                  << r.elapsed_seconds << " s\n";
    }
}
