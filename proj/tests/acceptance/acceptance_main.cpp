// Acceptance suite: ten end-to-end criteria, one per theorem-level claim the
// laboratory is expected to reproduce at desk scale. Each criterion prints
// exactly one "C<k> PASS/FAIL — detail" line with its tolerances pinned below
// and exits nonzero on FAIL, so `ctest` surfaces every criterion separately.
//
// Invocation: gffperc_acceptance [1..10]; without an argument all ten run.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gffperc/exploration.hpp"
#include "gffperc/gff.hpp"
#include "gffperc/green.hpp"
#include "gffperc/levelset.hpp"
#include "gffperc/multigraph.hpp"
#include "gffperc/rng.hpp"
#include "gffperc/stats.hpp"
#include "gffperc/tree_process.hpp"
#include "oracles.hpp"

namespace {

using namespace gffperc;
using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

bool report(int criterion, bool pass, const std::string& detail) {
    std::printf("C%d %s — %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    return pass;
}

__attribute__((format(printf, 1, 2))) std::string format(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    char buf[1024];
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    return buf;
}

Multigraph connected_multigraph(int n, int d, uint64_t seed) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        Rng rng(derive_seed(seed, "graph", static_cast<uint64_t>(attempt)));
        Multigraph g = generate_configuration_model(n, d, rng);
        if (is_connected(g)) return g;
    }
    throw std::runtime_error("no connected multigraph in 200 attempts");
}

Field sampled_field(const Multigraph& g, uint64_t seed) {
    Rng rng(derive_seed(seed, {"field"}));
    return SparseFieldSampler(g).sample(rng);
}

// Largest level-set component of one fresh replica (graph + field), as a
// fraction of n; 0 when the level set is empty.
double giant_fraction_replica(int n, uint64_t seed) {
    const Multigraph g = connected_multigraph(n, 3, seed);
    const Field f = sampled_field(g, seed);
    const ComponentDecomposition dec = components(g, level_set(f, 0.0), 0.0);
    return dec.sizes.empty() ? 0.0 : static_cast<double>(dec.sizes[0]) / static_cast<double>(n);
}

// --- C1: law of the giant component ---------------------------------------
// Tree-side survival probability eta vs the mean giant fraction, measured
// three ways: exactly sampled fields at n=2000 and n=10^4, and at n=10^5 a
// lazy-exploration sandwich. The lazy explorer works at a level shifted by
// +-1/log n (upper mode undershoots the survival probability, lower mode
// overshoots); the midpoint cancels the shift to first order.
bool criterion_giant_law() {
    constexpr uint64_t kSeed = 8101;
    constexpr double kTol = 0.03;
    constexpr int64_t kTreeReps = 200000;
    constexpr int kTreeGenerations = 60;
    constexpr int64_t kLazyReps = 4000;
    constexpr int kLazyN = 100000;
    const auto t0 = clock_type::now();

    Rng tree_rng(derive_seed(kSeed, {"tree"}));
    const EtaEstimate eta = estimate_eta(3, 0.0, kTreeGenerations, kTreeReps, tree_rng);

    std::vector<double> frac2000, frac1e4;
    for (int r = 0; r < 200; ++r)
        frac2000.push_back(giant_fraction_replica(2000, derive_seed(kSeed, "exact2000", r)));
    for (int r = 0; r < 20; ++r)
        frac1e4.push_back(giant_fraction_replica(10000, derive_seed(kSeed, "exact1e4", r)));

    ExplorationParams params;
    params.kappa = 0.25;
    LazyGraphState state(kLazyN, 3);
    int64_t successes[2] = {0, 0};
    for (int64_t r = 0; r < kLazyReps; ++r)
        for (int m = 0; m < 2; ++m) {
            const uint64_t s =
                derive_seed(kSeed, m ? "lazy-lo" : "lazy-up", static_cast<uint64_t>(r));
            Rng pair_rng(derive_seed(s, {"pairing"}));
            const GaussianReservoir reservoir(derive_seed(s, {"field"}));
            state.reset();
            const int x = static_cast<int>(pair_rng.next_below(kLazyN));
            const ExplorationOutcome out =
                explore_component(state, x, 0.0, params, m ? ExploreMode::lower : ExploreMode::upper,
                                  pair_rng, reservoir);
            if (out.verdict == Verdict::successful) ++successes[m];
        }
    const double upper = static_cast<double>(successes[0]) / static_cast<double>(kLazyReps);
    const double lower = static_cast<double>(successes[1]) / static_cast<double>(kLazyReps);
    const double lazy_mid = 0.5 * (upper + lower);

    const double gap2000 = std::abs(mean(frac2000) - eta.point_estimate);
    const double gap1e4 = std::abs(mean(frac1e4) - eta.point_estimate);
    const double gap_lazy = std::abs(lazy_mid - eta.point_estimate);
    const double elapsed = seconds_since(t0);
    const bool pass =
        gap2000 <= kTol && gap1e4 <= kTol && gap_lazy <= kTol && elapsed <= 1800.0;
    return report(1, pass,
                  format("tree eta=%.5f (se %.5f); |mean giant frac - eta|: n=2000 %.4f, "
                         "n=10^4 %.4f, n=10^5 lazy midpoint %.4f (upper %.4f lower %.4f); "
                         "tol %.2f each; elapsed %.0fs (budget 1800s)",
                         eta.point_estimate, eta.std_error, gap2000, gap1e4, gap_lazy, upper,
                         lower, kTol, elapsed));
}

// --- C2: second-largest component is Theta(log n) --------------------------
bool criterion_second_component() {
    constexpr uint64_t kSeed = 8102;
    constexpr double kBandLo = 0.5;   // band for median |C2| / log n ...
    constexpr double kBandHi = 2.5;   // ... ratio 5, within the <= 8 contract
    constexpr int kReps = 100;
    std::vector<double> log_ns, medians;
    double ratio_min = 1e9, ratio_max = -1e9;
    for (const int n : {512, 1024, 2048, 4096, 8192}) {
        std::vector<double> c2s;
        for (int r = 0; r < kReps; ++r) {
            const uint64_t s = derive_seed(kSeed, "n" + std::to_string(n), r);
            const Multigraph g = connected_multigraph(n, 3, s);
            const Field f = sampled_field(g, s);
            const ComponentDecomposition dec = components(g, level_set(f, 0.0), 0.0);
            c2s.push_back(dec.sizes.size() >= 2 ? static_cast<double>(dec.sizes[1]) : 0.0);
        }
        const double med = median(c2s);
        log_ns.push_back(std::log(static_cast<double>(n)));
        medians.push_back(med);
        const double ratio = med / log_ns.back();
        ratio_min = std::min(ratio_min, ratio);
        ratio_max = std::max(ratio_max, ratio);
    }
    const LinearFit fit = linear_fit(log_ns, medians);
    const bool pass = ratio_min >= kBandLo && ratio_max <= kBandHi && fit.slope > 0.0 &&
                      fit.r2 >= 0.8;
    return report(2, pass,
                  format("median |C2|/log n in [%.3f, %.3f] over n=512..8192 (band [%.1f, %.1f], "
                         "ratio %.0f <= 8); median |C2| vs log n: slope %.2f r2 %.4f (need r2 >= "
                         "0.8)",
                         ratio_min, ratio_max, kBandLo, kBandHi, kBandHi / kBandLo, fit.slope,
                         fit.r2));
}

// --- C3: 2-core and kernel densities vs tree probabilities -----------------
// Tree side: probability that the root has >= 2 (resp. >= 3) children whose
// offspring survives far; graph side: vertex shares of the 2-core of the
// giant and of its kernel.
bool criterion_core_kernel() {
    constexpr uint64_t kSeed = 8103;
    constexpr double kTol = 0.04;
    constexpr int kN = 4096, kReps = 30;
    Rng tree_rng(derive_seed(kSeed, {"tree"}));
    const CoreKernelProbs probs = estimate_core_kernel_probs(3, 0.0, 60, 200000, tree_rng);
    std::vector<double> core_frac, kernel_frac;
    for (int r = 0; r < kReps; ++r) {
        const uint64_t s = derive_seed(kSeed, "replica", r);
        const Multigraph g = connected_multigraph(kN, 3, s);
        const Field f = sampled_field(g, s);
        const ComponentDecomposition dec = components(g, level_set(f, 0.0), 0.0);
        if (dec.components.empty()) {
            core_frac.push_back(0.0);
            kernel_frac.push_back(0.0);
            continue;
        }
        const Subgraph core = two_core(g, dec.components[0]);
        core_frac.push_back(static_cast<double>(core.vertices.size()) / kN);
        kernel_frac.push_back(
            core.vertices.empty()
                ? 0.0
                : static_cast<double>(kernel(core).vertex_count()) / kN);
    }
    const double gap_core = std::abs(mean(core_frac) - probs.k1);
    const double gap_kernel = std::abs(mean(kernel_frac) - probs.k2);
    const bool pass = gap_core <= kTol && gap_kernel <= kTol;
    return report(3, pass,
                  format("n=4096, %d replicas: core share %.5f vs tree K1=%.5f (gap %.4f), "
                         "kernel share %.5f vs tree K2=%.5f (gap %.4f); tol %.2f each",
                         kReps, mean(core_frac), probs.k1, gap_core, mean(kernel_frac), probs.k2,
                         gap_kernel, kTol));
}

// --- C4: diameter of the giant stays O(log n) -------------------------------
bool criterion_diameter() {
    constexpr uint64_t kSeed = 8104;
    constexpr double kMaxOverMin = 5.0;
    constexpr int kReps = 50;
    double lo = 1e9, hi = -1e9;
    std::string per_n;
    for (const int n : {512, 1024, 2048, 4096, 8192}) {
        std::vector<double> ratios;
        for (int r = 0; r < kReps; ++r) {
            const uint64_t s = derive_seed(kSeed, "n" + std::to_string(n), r);
            const Multigraph g = connected_multigraph(n, 3, s);
            const Field f = sampled_field(g, s);
            const ComponentDecomposition dec = components(g, level_set(f, 0.0), 0.0);
            if (dec.components.empty()) continue;
            ratios.push_back(diameter(g, dec.components[0]) /
                             std::log(static_cast<double>(n)));
        }
        const double m = mean(ratios);
        per_n += format("%s%.2f", per_n.empty() ? "" : ", ", m);
        lo = std::min(lo, m);
        hi = std::max(hi, m);
    }
    const bool pass = hi / lo <= kMaxOverMin;
    return report(4, pass,
                  format("mean D1/log n over n=512..8192: {%s}; max/min %.2f (need <= %.0f), 50 "
                         "replicas each",
                         per_n.c_str(), hi / lo, kMaxOverMin));
}

// --- C5: typical distance in the giant vs log-base-lambda of n -------------
// The tree growth rate drives the asymptotic distance scale. At n=10^4 the
// measured median sits below the asymptote by an additive offset that decays
// only like 1/log n, so the ratio is reported together with its trend across
// n to make the finite-size nature of any miss visible.
bool criterion_typical_distance() {
    constexpr uint64_t kSeed = 8105;
    constexpr double kLo = 0.8, kHi = 1.2;
    Rng tree_rng(derive_seed(kSeed, {"tree"}));
    const double lambda0 = estimate_lambda(3, 0.0, 32, 3000, tree_rng);

    const auto median_distance = [&](int n, int graphs, int pairs_per_graph,
                                     int64_t& pairs_out) {
        std::vector<double> dists;
        for (int gi = 0; gi < graphs; ++gi) {
            const uint64_t s = derive_seed(kSeed, "n" + std::to_string(n), gi);
            const Multigraph g = connected_multigraph(n, 3, s);
            const Field f = sampled_field(g, s);
            const ComponentDecomposition dec = components(g, level_set(f, 0.0), 0.0);
            Rng pair_rng(derive_seed(s, {"pairs"}));
            for (const int dist :
                 sample_typical_distances(g, dec.components.at(0), pairs_per_graph, pair_rng))
                dists.push_back(static_cast<double>(dist));
        }
        pairs_out = static_cast<int64_t>(dists.size());
        return median(dists);
    };

    int64_t pairs_main = 0, pairs_ctx = 0;
    const double med = median_distance(10000, 3, 3400, pairs_main);
    const double target = std::log(10000.0) / std::log(lambda0);
    const double ratio = med / target;
    // context points showing the drift of the ratio with n
    const double med_small = median_distance(4096, 1, 3000, pairs_ctx);
    const double ratio_small = med_small / (std::log(4096.0) / std::log(lambda0));
    const double med_large = median_distance(16384, 1, 2500, pairs_ctx);
    const double ratio_large = med_large / (std::log(16384.0) / std::log(lambda0));
    const double lambda_needed = std::exp(kLo * std::log(10000.0) / med);

    const bool pass = ratio >= kLo && ratio <= kHi;
    return report(5, pass,
                  format("tree growth rate lambda0=%.4f; median distance %.1f over %lld pairs at "
                         "n=10^4; ratio to log_lambda0(n)=%.2f is %.3f vs [%.1f, %.1f]; ratio "
                         "trend %.3f (n=4096) -> %.3f (n=10^4) -> %.3f (n=16384): additive "
                         "offset %.1f levels, shrinking with n; band at n=10^4 would need "
                         "lambda0 >= %.4f",
                         lambda0, med, static_cast<long long>(pairs_main), target, ratio, kLo,
                         kHi, ratio_small, ratio, ratio_large, target - med, lambda_needed));
}

// --- C6: local limit of the giant around a typical vertex ------------------
bool criterion_local_limit() {
    constexpr uint64_t kSeed = 8106;
    constexpr double kTvTol = 0.05;
    constexpr int kRadius = 2, kN = 8192, kGraphs = 8;
    Rng tree_rng(derive_seed(kSeed, {"tree"}));
    const std::map<std::string, double> tree_law =
        conditioned_ball_distribution(3, 0.0, kRadius, 60, 100000, tree_rng);
    std::map<std::string, int64_t> counts;
    int64_t total = 0;
    for (int gi = 0; gi < kGraphs; ++gi) {
        const uint64_t s = derive_seed(kSeed, "graph", gi);
        const Multigraph g = connected_multigraph(kN, 3, s);
        const Field f = sampled_field(g, s);
        const ComponentDecomposition dec = components(g, level_set(f, 0.0), 0.0);
        for (const auto& [code, count] : ball_census(g, dec.components.at(0), kRadius)) {
            counts[code] += count;
            total += count;
        }
    }
    double tv = 0.0;
    std::set<std::string> keys;
    for (const auto& [code, p] : tree_law) keys.insert(code);
    for (const auto& [code, c] : counts) keys.insert(code);
    for (const std::string& code : keys) {
        const auto ct = counts.find(code);
        const auto tp = tree_law.find(code);
        const double empirical =
            ct == counts.end() ? 0.0 : static_cast<double>(ct->second) / static_cast<double>(total);
        tv += std::abs(empirical - (tp == tree_law.end() ? 0.0 : tp->second));
    }
    tv *= 0.5;
    const auto nt = counts.find(kNonTreeBallKey);
    const double nontree_share =
        nt == counts.end() ? 0.0 : static_cast<double>(nt->second) / static_cast<double>(total);
    const bool pass = tv <= kTvTol;
    return report(6, pass,
                  format("radius-%d ball census over the giant at n=%d (%d graphs, %lld balls, "
                         "%zu codes) vs conditioned tree law: TV %.4f (tol %.2f); non-tree ball "
                         "share %.4f",
                         kRadius, kN, kGraphs, static_cast<long long>(total), keys.size(), tv,
                         kTvTol, nontree_share));
}

// --- C7: deterministic identities ------------------------------------------
// (a) the hitting-time conditional law agrees with dense Schur conditioning
//     on every distinct connected multigraph reachable by exhaustive matching
//     enumeration (all pairings on n*d <= 18 half-edges), and on sampled
//     multigraphs at the sizes where enumeration is combinatorially out of
//     reach, exhausting every (subset, outside-vertex) pair per graph;
// (b) the spectral transfer obeys L L^T = G at n=256;
// (c) complete-graph Green values match the closed form on K4;
// (d) the tree Green function matches an independent radial linear solve;
// (e) two coupled tree fields driven by the same noise differ by exactly
//     (root offset) * (d-1)^{-height}.
bool criterion_deterministic_oracles() {
    constexpr uint64_t kSeed = 8107;
    constexpr double kLawTol = 1e-9;
    constexpr double kTransferTol = 1e-8;
    constexpr double kCompleteTol = 1e-10;
    constexpr double kTreeGreenTol = 1e-12;
    constexpr double kCouplingTol = 1e-12;

    // exhaustive conditional check: every nonempty proper subset A, every y
    // outside A, comparing both conditioning routes
    int64_t law_count = 0;
    const auto check_all_subsets = [&law_count](const Multigraph& g, Rng& rng) {
        const GreenMatrix green = green_zero_average(g);
        double worst = 0.0;
        for (int mask = 1; mask < (1 << g.n) - 1; ++mask) {
            std::vector<int> subset;
            for (int v = 0; v < g.n; ++v)
                if (mask & (1 << v)) subset.push_back(v);
            std::vector<double> values(subset.size());
            Eigen::VectorXd values_vec(static_cast<int>(subset.size()));
            for (std::size_t i = 0; i < subset.size(); ++i)
                values[i] = values_vec(static_cast<int>(i)) = rng.next_normal();
            const HittingProfile profile = hitting_profile(g, subset);
            for (int y = 0; y < g.n; ++y) {
                if (mask & (1 << y)) continue;
                const ConditionalLaw law = conditional_law(g, green, profile, values_vec, y);
                const oracle::SchurLaw ref =
                    oracle::schur_conditional(green.values, subset, values, y);
                worst = std::max(worst, std::abs(law.mean - ref.mean));
                worst = std::max(worst, std::abs(law.variance - ref.variance));
                ++law_count;
            }
        }
        return worst;
    };

    double worst_law = 0.0;
    int64_t graph_count = 0;
    for (const auto& [n, d] : std::vector<std::pair<int, int>>{
             {2, 3}, {4, 3}, {6, 3}, {2, 4}, {3, 4}, {4, 4}, {2, 5}, {2, 6}, {3, 6}}) {
        std::set<std::array<uint8_t, 18>> seen;
        std::vector<Multigraph> graphs;
        oracle::for_each_matching(n * d, [&](const std::vector<int>& pairing) {
            // canonical edge-multiset signature for deduplication
            std::array<uint8_t, 18> key{};
            int e = 0;
            for (int i = 0; i < n * d; ++i)
                if (pairing[i] > i)
                    key[e++] = static_cast<uint8_t>((i / d) << 4 | (pairing[i] / d));
            std::sort(key.begin(), key.begin() + e);
            if (!seen.insert(key).second) return;
            Multigraph g;
            g.n = n;
            g.d = d;
            g.pairing = pairing;
            if (is_connected(g)) graphs.push_back(std::move(g));
        });
        Rng rng(derive_seed(kSeed, "enum", static_cast<uint64_t>(n * 100 + d)));
        for (const Multigraph& g : graphs) worst_law = std::max(worst_law, check_all_subsets(g, rng));
        graph_count += static_cast<int64_t>(graphs.size());
    }
    for (const auto& [n, d, reps] : std::vector<std::array<int, 3>>{
             {8, 3, 150}, {10, 3, 150}, {9, 4, 100}, {10, 5, 60}}) {
        std::set<std::vector<int>> seen;
        Rng graph_rng(derive_seed(kSeed, "sample", static_cast<uint64_t>(n * 100 + d)));
        Rng rng(derive_seed(kSeed, "values", static_cast<uint64_t>(n * 100 + d)));
        for (int r = 0; r < reps; ++r) {
            const Multigraph g = generate_configuration_model(n, d, graph_rng);
            if (!is_connected(g) || !seen.insert(g.pairing).second) continue;
            worst_law = std::max(worst_law, check_all_subsets(g, rng));
            ++graph_count;
        }
    }

    const Multigraph g256 = connected_multigraph(256, 3, derive_seed(kSeed, {"transfer-graph"}));
    const GreenMatrix green256 = green_zero_average(g256);
    const SpectralSampler sampler256(g256, green256);
    const Eigen::MatrixXd& transfer = sampler256.transfer();
    const double transfer_err =
        (transfer * transfer.transpose() - green256.values).cwiseAbs().maxCoeff();

    const GreenMatrix green_k4 = green_zero_average(oracle::complete(4));
    double complete_err = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            complete_err = std::max(
                complete_err, std::abs(green_k4.values(i, j) - (i == j ? 9.0 / 16.0 : -3.0 / 16.0)));

    // independent radial route to the tree Green function: solve the
    // distance-indexed balance equations g_k = (g_{k-1} + (d-1) g_{k+1}) / d
    // with unit source at the root and an absorbing closure at depth 60
    double tree_green_err = 0.0;
    for (int d = 3; d <= 6; ++d) {
        const int depth = 60;
        Eigen::MatrixXd system = Eigen::MatrixXd::Zero(depth + 1, depth + 1);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(depth + 1);
        system(0, 0) = 1.0;
        system(0, 1) = -1.0;
        rhs(0) = 1.0;
        for (int k = 1; k < depth; ++k) {
            system(k, k) = 1.0;
            system(k, k - 1) = -1.0 / d;
            system(k, k + 1) = -static_cast<double>(d - 1) / d;
        }
        system(depth, depth) = 1.0;
        system(depth, depth - 1) = -1.0 / d;
        const Eigen::VectorXd radial = system.fullPivLu().solve(rhs);
        for (int dist = 0; dist <= 12; ++dist)
            tree_green_err = std::max(tree_green_err,
                                      std::abs(green_tree(d, dist) - radial(dist)));
    }

    Rng couple_rng(derive_seed(kSeed, {"couple"}));
    double coupling_err = 0.0;
    for (int d = 3; d <= 6; ++d)
        for (int rep = 0; rep < 100; ++rep) {
            const double offset = 0.25 + couple_rng.next_unit();
            double low = couple_rng.next_normal();
            double high = low + offset;
            for (int height = 1; height <= 30; ++height) {
                const double xi = couple_rng.next_normal();
                low = tree_gff_child(low, xi, d);
                high = tree_gff_child(high, xi, d);
                coupling_err =
                    std::max(coupling_err, std::abs((high - low) -
                                                    offset * std::pow(d - 1, -height)));
            }
        }

    const bool pass = worst_law <= kLawTol && transfer_err <= kTransferTol &&
                      complete_err <= kCompleteTol && tree_green_err <= kTreeGreenTol &&
                      coupling_err <= kCouplingTol;
    return report(7, pass,
                  format("conditional law vs Schur: worst %.2e over %lld checks on %lld connected "
                         "multigraphs (tol %.0e); L L^T vs G at n=256: %.2e (tol %.0e); K4 Green: "
                         "%.2e (tol %.0e); tree Green vs radial solve: %.2e (tol %.0e); coupled "
                         "field offset decay: %.2e (tol %.0e)",
                         worst_law, static_cast<long long>(law_count),
                         static_cast<long long>(graph_count), kLawTol, transfer_err, kTransferTol,
                         complete_err, kCompleteTol, tree_green_err, kTreeGreenTol, coupling_err,
                         kCouplingTol));
}

// --- C8: one-step conditional law deep inside tree neighborhoods -----------
// Pairs (A, y): A a connected set whose radius-6 ball is cycle-free, y a
// vertex just outside A (its unique neighbor inside A is ybar; uniqueness is
// forced by the cycle-free ball). The conditional mean of the field at y
// given the values on A must sit within 10 (d-1)^{-6} max|field on A| of
// field(ybar)/(d-1), and the conditional variance within 10 (d-1)^{-6} of
// d/(d-1). Qualifying sets are located by exhaustive per-graph scan: at
// n=2000 only a couple of vertices per graph have a cycle-free radius-6
// ball, so singleton sets dominate and larger sets are kept when they occur.
bool criterion_coupling_bounds() {
    constexpr uint64_t kSeed = 8108;
    constexpr int kN = 2000, kD = 3, kRadius = 6;
    constexpr int64_t kPairTarget = 1000;
    constexpr int kMaxGraphs = 200;
    constexpr double kPassShare = 0.99;
    constexpr double kLawTol = 1e-9;
    const double cap = 10.0 * std::pow(kD - 1, -kRadius);
    const auto t0 = clock_type::now();

    int64_t pairs = 0, passes = 0, graphs_used = 0;
    int64_t size_hist[4] = {0, 0, 0, 0};
    double worst_mean_rel = 0.0, worst_var = 0.0, law_vs_schur = 0.0;
    for (int gi = 0; gi < kMaxGraphs && pairs < kPairTarget; ++gi) {
        Rng graph_rng(derive_seed(kSeed, "graph", static_cast<uint64_t>(gi)));
        const Multigraph g = generate_configuration_model(kN, kD, graph_rng);
        if (!is_connected(g)) continue;

        // every vertex with a cycle-free radius-6 ball, then adjacent 2-sets
        // and 3-sets that keep the property
        std::vector<std::vector<int>> sets;
        for (int v = 0; v < kN; ++v)
            if (tree_excess(ball(g, {v}, kRadius)) == 0) sets.push_back({v});
        const std::size_t singles = sets.size();
        for (std::size_t i = 0; i < singles; ++i) {
            const int v = sets[i][0];
            for (int k = 0; k < kD; ++k) {
                const int w = g.neighbor(v, k);
                if (w >= v) continue;  // each pair once, from its larger endpoint
                std::vector<int> pair_set{w, v};
                if (tree_excess(ball(g, pair_set, kRadius)) != 0) continue;
                sets.push_back(pair_set);
                for (int k2 = 0; k2 < kD; ++k2) {
                    const int u = g.neighbor(w, k2);
                    if (u == v || u == w) continue;
                    std::vector<int> triple{v, w, u};
                    std::sort(triple.begin(), triple.end());
                    if (tree_excess(ball(g, triple, kRadius)) == 0) sets.push_back(triple);
                }
            }
        }
        if (sets.empty()) continue;
        ++graphs_used;
        const GreenMatrix green = green_zero_average(g);
        const Field psi = sampled_field(g, derive_seed(kSeed, "field", gi));
        for (const std::vector<int>& subset : sets) {
            if (pairs >= kPairTarget) break;
            std::vector<char> in_subset(kN, 0);
            for (const int a : subset) in_subset[a] = 1;
            const int m = static_cast<int>(subset.size());
            Eigen::MatrixXd cov(m, m);
            Eigen::VectorXd values(m);
            double max_abs = 0.0;
            for (int i = 0; i < m; ++i) {
                values(i) = psi.values[subset[i]];
                max_abs = std::max(max_abs, std::abs(values(i)));
                for (int j = 0; j < m; ++j) cov(i, j) = green.values(subset[i], subset[j]);
            }
            const Eigen::LDLT<Eigen::MatrixXd> solver(cov);
            for (int ai = 0; ai < m && pairs < kPairTarget; ++ai)
                for (int k = 0; k < kD && pairs < kPairTarget; ++k) {
                    const int y = g.neighbor(subset[ai], k);
                    if (in_subset[y]) continue;
                    const int ybar = subset[ai];
                    Eigen::VectorXd cross(m);
                    for (int i = 0; i < m; ++i) cross(i) = green.values(subset[i], y);
                    const Eigen::VectorXd weights = solver.solve(cross);
                    const double cond_mean = weights.dot(values);
                    const double cond_var = green.values(y, y) - cross.dot(weights);
                    const double dev_mean =
                        std::abs(cond_mean - psi.values[ybar] / (kD - 1));
                    const double dev_var =
                        std::abs(cond_var - static_cast<double>(kD) / (kD - 1));
                    ++pairs;
                    ++size_hist[m];
                    worst_mean_rel = std::max(worst_mean_rel, dev_mean / max_abs);
                    worst_var = std::max(worst_var, dev_var);
                    if (dev_mean <= cap * max_abs && dev_var <= cap) ++passes;
                    if (pairs % 50 == 0) {
                        // second route for the same conditional law
                        const HittingProfile profile = hitting_profile(g, subset);
                        const ConditionalLaw law =
                            conditional_law(g, green, profile, values, y);
                        law_vs_schur = std::max(
                            law_vs_schur, std::max(std::abs(law.mean - cond_mean),
                                                   std::abs(law.variance - cond_var)));
                    }
                }
        }
    }
    const double share = static_cast<double>(passes) / static_cast<double>(pairs);
    const bool pass =
        pairs >= kPairTarget && share >= kPassShare && law_vs_schur <= kLawTol;
    return report(8, pass,
                  format("%lld pairs on %lld graphs at n=%d (|A|=1/2/3: %lld/%lld/%lld): both "
                         "bounds hold in %.1f%% (need >= %.0f%%); worst |mean - "
                         "psi(ybar)/2|/max|psi_A| %.4f, worst |var - 3/2| %.4f (cap %.4f); "
                         "hitting-time law vs Schur %.1e (tol %.0e); elapsed %.0fs",
                         static_cast<long long>(pairs), static_cast<long long>(graphs_used), kN,
                         static_cast<long long>(size_hist[1]), static_cast<long long>(size_hist[2]),
                         static_cast<long long>(size_hist[3]), 100.0 * share, 100.0 * kPassShare,
                         worst_mean_rel, worst_var, cap, law_vs_schur, kLawTol,
                         seconds_since(t0)));
}

// --- C9: exponential tail of the finite cluster on the tree ----------------
// The log-tail of P(|C| >= k, C finite) must fit a line with negative slope.
// Beyond k ~ 55 the expected count at 10^6 replicas drops below one and the
// empirical bins are exactly zero, so the fit runs over the positive bins,
// which are required to span at least [10, 50].
bool criterion_finite_tail() {
    constexpr uint64_t kSeed = 8109;
    constexpr int64_t kReps = 1000000;
    constexpr double kR2Min = 0.95;
    std::vector<int64_t> grid;
    for (int64_t k = 10; k <= 200; k += 5) grid.push_back(k);
    Rng rng(derive_seed(kSeed, {"tail"}));
    const TailCurve curve = finite_cluster_tail(3, 0.0, grid, kReps, rng);
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (curve.tail[i] > 0.0) {
            xs.push_back(static_cast<double>(grid[i]));
            ys.push_back(std::log(curve.tail[i]));
        }
    const bool coverage = xs.size() >= 8 && !xs.empty() && xs.back() >= 50.0;
    const LinearFit fit = coverage ? linear_fit(xs, ys) : LinearFit{};
    const double finite_share =
        static_cast<double>(curve.finite_replicas) / static_cast<double>(curve.replicas);
    const bool pass = coverage && fit.slope < 0.0 && fit.r2 >= kR2Min;
    return report(9, pass,
                  format("log tail of P(|C| >= k, finite) over k=10..200 step 5 at 10^6 "
                         "replicas: %zu positive bins up to k=%.0f (beyond: expected count < 1, "
                         "bins empty), fit slope %.4f r2 %.4f (need negative slope, r2 >= %.2f); "
                         "finite share %.4f",
                         xs.size(), xs.empty() ? 0.0 : xs.back(), fit.slope, fit.r2, kR2Min,
                         finite_share));
}

// --- C10: probability of a max-field excursion above (log n)^{2/3} ----------
// The bound is asymptotic: with Var(psi) ~ 2 on tree-like 3-regular graphs,
// the maximum over n vertices concentrates near sqrt(4 log n), which stays
// ABOVE the (log n)^{2/3} threshold until log n >= 64 (n ~ 10^27). At n=2000
// every replica therefore exceeds the threshold; the zero-exceedance target
// is reported with the measured statistics rather than weakened.
bool criterion_max_field() {
    constexpr uint64_t kSeed = 8110;
    constexpr int kN = 2000, kReps = 500;
    const double threshold = std::pow(std::log(static_cast<double>(kN)), 2.0 / 3.0);
    int64_t exceed = 0;
    std::vector<double> maxima;
    for (int r = 0; r < kReps; ++r) {
        const uint64_t s = derive_seed(kSeed, "replica", r);
        const Multigraph g = connected_multigraph(kN, 3, s);
        const Field f = sampled_field(g, s);
        const double m = field_max_abs(f);
        maxima.push_back(m);
        if (m >= threshold) ++exceed;
    }
    std::sort(maxima.begin(), maxima.end());
    const bool pass = exceed == 0;
    return report(
        10, pass,
        format("exceedances of max|psi| >= (log n)^{2/3} = %.3f at n=%d: %lld/%d; measured "
               "max|psi| min/median/max = %.2f/%.2f/%.2f, typical scale sqrt(4 log n) = %.2f; "
               "the threshold overtakes the typical maximum only once log n >= 64 (n ~ 10^27), "
               "so zero exceedances are unreachable at this size",
               threshold, kN, static_cast<long long>(exceed), kReps, maxima.front(),
               maxima[maxima.size() / 2], maxima.back(), std::sqrt(4.0 * std::log(2000.0))));
}

bool run_criterion(int k) {
    switch (k) {
        case 1: return criterion_giant_law();
        case 2: return criterion_second_component();
        case 3: return criterion_core_kernel();
        case 4: return criterion_diameter();
        case 5: return criterion_typical_distance();
        case 6: return criterion_local_limit();
        case 7: return criterion_deterministic_oracles();
        case 8: return criterion_coupling_bounds();
        case 9: return criterion_finite_tail();
        case 10: return criterion_max_field();
        default: throw std::invalid_argument("criterion number must be 1..10");
    }
}

}  // namespace

int main(int argc, char** argv) {
    try {
        if (argc < 2) {
            int failures = 0;
            for (int k = 1; k <= 10; ++k)
                if (!run_criterion(k)) ++failures;
            return failures == 0 ? 0 : 1;
        }
        const int k = std::atoi(argv[1]);
        if (k < 1 || k > 10) {
            std::fprintf(stderr, "usage: %s [1..10]\n", argv[0]);
            return 2;
        }
        return run_criterion(k) ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "acceptance run failed: %s\n", e.what());
        return 2;
    }
}
