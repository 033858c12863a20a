// Microbenchmarks for the hot paths: weighted-Laplacian assembly, the
// matrix-free operator apply, one V-cycle, and a full BPCG solve.

#include <benchmark/benchmark.h>

#include "sgstokes/block_precon.hpp"
#include "sgstokes/experiment.hpp"
#include "sgstokes/krylov.hpp"

using namespace sgstokes;

namespace {

struct Fixture {
    std::shared_ptr<const TaylorHoodSpace> space;
    std::shared_ptr<const KLField> field;
    SGBasis basis;
    SGFEOperator op;
    std::shared_ptr<const MGHierarchy> mg;
    SGVector b;

    Fixture(int level, int M, int k) {
        space = std::make_shared<TaylorHoodSpace>(build_spaces(build_mesh(level)));
        field = std::make_shared<KLField>(build_2d_kle(1.0, 1.0, 0.2, M));
        basis = build_basis(M, k);
        op = build_operator(space, field, basis);
        mg = std::make_shared<MGHierarchy>(space);
        b = build_rhs(op, lift_boundary(*space));
    }
};

Fixture& fixture(int level, int M, int k) {
    static std::map<std::tuple<int, int, int>, std::unique_ptr<Fixture>> cache;
    auto& slot = cache[{level, M, k}];
    if (!slot) slot = std::make_unique<Fixture>(level, M, k);
    return *slot;
}

}  // namespace

static void BM_AssembleWeightedLaplacian(benchmark::State& state) {
    auto space = build_spaces(build_mesh(static_cast<int>(state.range(0))));
    LaplacianAssembler assembler(space);
    std::vector<double> w(assembler.n_quad_points(), 1.0);
    for (auto _ : state) {
        auto A = assembler.assemble_scalar(w);
        benchmark::DoNotOptimize(A);
    }
}
BENCHMARK(BM_AssembleWeightedLaplacian)->Arg(0)->Arg(1)->Arg(2);

static void BM_OperatorApply(benchmark::State& state) {
    auto& f = fixture(static_cast<int>(state.range(0)), 10, 1);
    SGVector x = f.b, y = f.op.zero_vector();
    for (auto _ : state) {
        f.op.apply(x, y);
        benchmark::DoNotOptimize(y);
    }
}
BENCHMARK(BM_OperatorApply)->Arg(0)->Arg(1)->Arg(2);

static void BM_VCycle(benchmark::State& state) {
    auto& f = fixture(static_cast<int>(state.range(0)), 10, 1);
    Vector r = Vector::Ones(f.mg->finest_free_dofs()), z(r.size());
    for (auto _ : state) {
        f.mg->vcycle(r, z);
        benchmark::DoNotOptimize(z);
    }
}
BENCHMARK(BM_VCycle)->Arg(1)->Arg(2);

static void BM_BpcgSolve(benchmark::State& state) {
    auto& f = fixture(static_cast<int>(state.range(0)), 10, 1);
    LinOp A = [&](const Vector& x, Vector& y) { f.op.apply_velocity_block(x, y); };
    LinOp W = [&](const Vector& x, Vector& y) {
        BlockPrecon probe = make_block_diag(f.op, f.mg);
        probe.apply_Atilde_inv(x, y);
    };
    const double a_star = estimate_extreme_eigs(A, W, f.op.dim_u()).lambda_min;
    BlockPrecon P = make_block_tri(f.op, f.mg, 0.9 * a_star);
    SolverConfig cfg;
    for (auto _ : state) {
        auto [x, rep] = bpcg_solve(f.op, P, f.b, cfg);
        benchmark::DoNotOptimize(rep.iterations);
    }
}
BENCHMARK(BM_BpcgSolve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
