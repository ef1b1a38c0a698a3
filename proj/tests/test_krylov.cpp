#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pdnsim/krylov.hpp"

#include "pdnsim/benchgen.hpp"
#include "pdnsim/denseref.hpp"
#include "pdnsim/mna.hpp"

#include "oracles.hpp"

#include <algorithm>

using namespace pdnsim;

namespace {

/// Uniform grounded RC ladder with nonsingular (diagonal) C.
MnaSystem rc_ladder(int n, double r, double c) {
    std::string nl = "t\n";
    for (int i = 0; i < n; ++i) {
        const std::string node = "n" + std::to_string(i);
        const std::string prev = i == 0 ? std::string("0") : "n" + std::to_string(i - 1);
        nl += "R" + std::to_string(i) + " " + prev + " " + node + " " + oracle::num(r) + "\n";
        nl += "C" + std::to_string(i) + " " + node + " 0 " + oracle::num(c) + "\n";
    }
    nl += ".end\n";
    return stamp(parse_netlist(nl));
}

DenseMat dense_operator(const SpMat& c, const SpMat& g, const KrylovVariant& v) {
    const DenseMat a = dense_a(c, g);
    const long n = a.rows();
    switch (v.kind) {
    case KrylovVariant::Kind::Standard:
        return a;
    case KrylovVariant::Kind::Invert:
        return a.fullPivLu().inverse();
    case KrylovVariant::Kind::Rational:
        return (DenseMat::Identity(n, n) - v.gamma * a).fullPivLu().inverse();
    }
    return a;
}

} // namespace

TEST_CASE("scalar rational system: Hessenberg and propagator") {
    // C = [1], G = [g]: H_1 = 1/(1+gamma*g), Hp = -g.
    const MnaSystem sys = rc_ladder(1, 2.0, 1.0); // g = 1/r = 0.5, c = 1
    const double g = 0.5, gamma = 0.3;
    const KrylovOperator op =
        KrylovOperator::make(sys.C, sys.G, KrylovVariant::rational(gamma));
    const Vec v = Vec::Ones(1);
    const KrylovBasis basis = arnoldi_fixed(op, v, 5);
    REQUIRE(basis.m == 1); // happy breakdown on a 1-dim system
    CHECK(basis.happy);
    CHECK(basis.hm()(0, 0) == doctest::Approx(1.0 / (1.0 + gamma * g)).epsilon(1e-14));
    CHECK(basis.propagator()(0, 0) == doctest::Approx(-g).epsilon(1e-12));
}

TEST_CASE("X2 v = 0 gives a happy breakdown at m = 1") {
    // Resistor-only circuit: C = 0, so the invert operator annihilates v.
    const Circuit c = parse_netlist("t\nR1 a 0 1\nR2 a b 1\nR3 b 0 1\n.end\n");
    const MnaSystem sys = stamp(c);
    const KrylovOperator op = KrylovOperator::make(sys.C, sys.G, KrylovVariant::invert());
    const KrylovBasis basis = arnoldi_fixed(op, Vec::Ones(sys.n), 10);
    CHECK(basis.m == 1);
    CHECK(basis.happy);
    CHECK(basis.h_next == 0.0);
}

TEST_CASE("mevp at h = 0 returns v") {
    const MnaSystem sys = rc_ladder(12, 1.0, 1e-12);
    const Vec v = oracle::random_vec(sys.n, 3);
    for (const auto variant : {KrylovVariant::invert(), KrylovVariant::rational(1e-12)}) {
        const KrylovOperator op = KrylovOperator::make(sys.C, sys.G, variant);
        const KrylovBasis basis = arnoldi(op, v, 1e-12, 1e-8, 30);
        const Vec back = mevp_eval(basis, 0.0);
        CHECK((back - v).norm() <= 1e-12 * v.norm());
    }
}

TEST_CASE("scalar decay matches exp") {
    const MnaSystem sys = rc_ladder(1, 2.0, 1.0); // a = g/c = 0.5
    const Vec v = Vec::Ones(1);
    const double h = 0.8;
    const KrylovOperator op =
        KrylovOperator::make(sys.C, sys.G, KrylovVariant::rational(0.5));
    const KrylovBasis basis = arnoldi_fixed(op, v, 3);
    const Vec y = mevp_eval(basis, h);
    CHECK(y[0] == doctest::Approx(std::exp(-0.5 * h)).epsilon(1e-12));
}

TEST_CASE("orthonormality and the Arnoldi relation hold for every variant") {
    const MnaSystem sys = rc_ladder(40, 1.0, 1e-12);
    const Vec v = oracle::random_vec(sys.n, 9);
    for (const auto variant :
         {KrylovVariant::standard(), KrylovVariant::invert(), KrylovVariant::rational(1e-12)}) {
        const KrylovOperator op = KrylovOperator::make(sys.C, sys.G, variant);
        const KrylovBasis b = arnoldi_fixed(op, v, 12);
        REQUIRE(b.m == 12);

        const DenseMat vtv = b.V.transpose() * b.V;
        CHECK((vtv - DenseMat::Identity(b.m, b.m)).cwiseAbs().maxCoeff() <= 1e-10);

        const DenseMat opd = dense_operator(sys.C, sys.G, variant);
        const DenseMat lhs = opd * b.V;
        DenseMat rhs = b.V * b.hm();
        rhs.col(b.m - 1) += b.h_next * b.v_next;
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <=
              1e-9 * lhs.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("posterior residual equals the true DAE residual (autonomous)") {
    const MnaSystem sys = rc_ladder(30, 1.0, 1e-12);
    const Vec v = oracle::random_vec(sys.n, 13, 0.0, 1.0);
    const double h = 5e-13;
    for (const auto variant :
         {KrylovVariant::standard(), KrylovVariant::invert(), KrylovVariant::rational(1e-12)}) {
        const KrylovOperator op = KrylovOperator::make(sys.C, sys.G, variant);
        const KrylovBasis b = arnoldi_fixed(op, v, 6);
        REQUIRE(!b.happy);

        // y(h) = beta V e^{h Hp} e1, y'(h) = beta V Hp e^{h Hp} e1.
        const DenseMat hp = b.propagator();
        const Vec small = b.beta * expm_dense(hp, h).col(0);
        const Vec y = b.V * small;
        const Vec ydot = b.V * (hp * small);
        const double true_resid = (sys.C * ydot + sys.G * y).norm();

        const double est = residual_estimate(op, b, h);
        CHECK(est == doctest::Approx(true_resid).epsilon(1e-6));
        CHECK(est > 0.0);
    }
}

TEST_CASE("happy breakdown reports zero residual") {
    const MnaSystem sys = rc_ladder(1, 1.0, 1.0);
    const KrylovOperator op = KrylovOperator::make(sys.C, sys.G, KrylovVariant::invert());
    const KrylovBasis b = arnoldi_fixed(op, Vec::Ones(1), 4);
    CHECK(b.happy);
    CHECK(residual_estimate(op, b, 1.0) == 0.0);
}

TEST_CASE("stiff bench: error ordering at m = 3") {
    StiffBenchSpec spec;
    spec.n = 80;
    spec.stiffness = 4.7e6;
    spec.tau_slow = 1e-11;
    const StiffBench bench = make_stiff_bench(spec);
    CHECK(bench.realized_stiffness >= 1e6);
    CHECK(bench.realized_stiffness / spec.stiffness >= 0.5);
    CHECK(bench.realized_stiffness / spec.stiffness <= 2.0);

    const double h = 4e-13;
    const double gamma = 1e-13;
    const Vec exact = expmv_dense(bench.C, bench.G, bench.v, h);
    const double scale = exact.norm();

    auto rel_err = [&](KrylovVariant variant) {
        const KrylovOperator op = KrylovOperator::make(bench.C, bench.G, variant);
        const KrylovBasis b = arnoldi_fixed(op, bench.v, 3);
        return (mevp_eval(b, h) - exact).norm() / scale;
    };
    const double e_std = rel_err(KrylovVariant::standard());
    const double e_inv = rel_err(KrylovVariant::invert());
    const double e_rat = rel_err(KrylovVariant::rational(gamma));

    CHECK(e_rat <= e_inv);
    CHECK(e_inv < e_std);
    CHECK(e_std / e_inv >= 10.0);
}

TEST_CASE("rational mevp matches the dense oracle within its estimate") {
    const MnaSystem sys = rc_ladder(50, 1.0, 1e-12);
    const Vec v = oracle::random_vec(sys.n, 21, 0.0, 1.0);
    const double h = 4e-12;
    const KrylovOperator op =
        KrylovOperator::make(sys.C, sys.G, KrylovVariant::rational(1e-12));
    const KrylovBasis b = arnoldi(op, v, h, 1e-8, 8);
    const Vec approx = mevp_eval(b, h);
    const Vec exact = expmv_dense(sys.C, sys.G, v, h);
    const double r = residual_estimate(op, b, h);
    const double bound = std::max(1e-6, 10.0 * r / exact.norm());
    CHECK((approx - exact).norm() / exact.norm() <= bound);
}

TEST_CASE("scaling invariance: reuse at a shorter step matches a fresh basis") {
    const MnaSystem sys = rc_ladder(30, 1.0, 1e-12);
    const Vec v = oracle::random_vec(sys.n, 31, 0.0, 1.0);
    const double h = 1e-11;
    const double eps = 1e-7;
    const KrylovOperator op =
        KrylovOperator::make(sys.C, sys.G, KrylovVariant::rational(1e-11));
    const KrylovBasis built_for_h = arnoldi(op, v, h, eps, 30);
    for (double frac : {0.5, 0.25, 0.125}) {
        const double hp = frac * h;
        const Vec reused = mevp_eval(built_for_h, hp);
        const KrylovBasis fresh = arnoldi(op, v, hp, eps, 30);
        const Vec direct = mevp_eval(fresh, hp);
        const Vec exact = expmv_dense(sys.C, sys.G, v, hp);
        const double tol = 2.0 * std::max(residual_estimate(op, built_for_h, hp),
                                          residual_estimate(op, fresh, hp)) +
                           1e-12 * exact.norm();
        CHECK((reused - exact).norm() <= tol);
        CHECK((direct - exact).norm() <= tol);
    }
}

TEST_CASE("budget failure raises NoConvergence; fixed builder never does") {
    const MnaSystem sys = rc_ladder(24, 1.0, 1e-12);
    const Vec v = oracle::random_vec(sys.n, 51, 0.0, 1.0);
    const KrylovOperator op =
        KrylovOperator::make(sys.C, sys.G, KrylovVariant::invert());
    // A budget below the roundoff floor of the residual cannot be met.
    CHECK_THROWS_AS(arnoldi(op, v, 1e-11, 1e-30, 2), NoConvergence);
    CHECK_NOTHROW(arnoldi_fixed(op, v, 2));
}

TEST_CASE("error surface") {
    const MnaSystem sys = rc_ladder(24, 1.0, 1e-12);
    const Vec v = oracle::random_vec(sys.n, 41, 0.0, 1.0);

    SUBCASE("full subspace is exact for every h") {
        const auto rows = error_surface(sys.C, sys.G, v, KrylovVariant::invert(),
                                        {1e-13, 1e-12, 1e-11}, {static_cast<int>(sys.n)});
        for (const auto& r : rows) CHECK(r.rel_err <= 1e-10);
    }

    SUBCASE("standard shows a high plateau at large h where rational falls") {
        StiffBenchSpec spec;
        spec.n = 60;
        spec.stiffness = 4.7e6;
        spec.tau_slow = 1e-11;
        const StiffBench bench = make_stiff_bench(spec);
        const double h = 4e-12; // large step for this spectrum
        std::vector<int> m_grid{2, 4, 6, 8, 10};
        const auto std_rows = error_surface(bench.C, bench.G, bench.v,
                                            KrylovVariant::standard(), {h}, m_grid);
        const auto rat_rows = error_surface(bench.C, bench.G, bench.v,
                                            KrylovVariant::rational(1e-12), {h}, m_grid);
        for (std::size_t i = 0; i < m_grid.size(); ++i)
            CHECK(rat_rows[i].rel_err < std_rows[i].rel_err);
        // The standard curve stays poor across this m range.
        for (const auto& r : std_rows) CHECK(r.rel_err > 1e-2);
    }

    SUBCASE("gamma insensitivity over two decades around h") {
        StiffBenchSpec spec;
        spec.n = 60;
        spec.stiffness = 4.7e6;
        spec.tau_slow = 1e-11;
        const StiffBench bench = make_stiff_bench(spec);
        const double h = 4e-12;
        const int m = 10;
        std::vector<double> errs;
        for (double gamma : {h / 10.0, h / 3.0, h, 3.0 * h, 10.0 * h}) {
            const auto rows = error_surface(bench.C, bench.G, bench.v,
                                            KrylovVariant::rational(gamma), {h}, {m});
            errs.push_back(rows[0].rel_err);
        }
        const double lo = *std::min_element(errs.begin(), errs.end());
        const double hi = *std::max_element(errs.begin(), errs.end());
        CHECK(hi / lo < 10.0);
    }
}

TEST_CASE("standard-variant oracle guard: singular C has no dense A") {
    const Circuit c = parse_netlist("t\nR1 a 0 1\nR2 a b 1\nC1 b 0 1p\n.end\n");
    const MnaSystem sys = stamp(c);
    CHECK_THROWS_AS(dense_a(sys.C, sys.G), OracleUnavailable);
}
