#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "pathsum/oracle.hpp"
#include "pathsum/special_functions.hpp"

using namespace pathsum;

namespace {

MatrixSpec k2_spec(double t_max) {
    MatrixSpec s(2, 0.0, t_max);
    s.add_entry(0, 0, "1");
    s.add_entry(0, 1, "exp(t)");
    s.add_entry(1, 0, "exp(-t)");
    s.add_entry(1, 1, "1");
    return s;
}

double k2_ref(int r, int c, double t) {
    const double s5 = std::sqrt(5.0);
    const double a = std::cosh(s5 * t / 2.0);
    const double b = std::sinh(s5 * t / 2.0) / s5;
    const double pref = std::exp(t / 2.0);
    if (r == 0 && c == 0) return pref * std::exp(t) * (a - b);
    if (r == 0 && c == 1) return pref * 2.0 * std::exp(t) * b;
    if (r == 1 && c == 0) return pref * 2.0 * b;
    return pref * (a + b);
}

double rk4_err(const MatrixSpec& spec, const TimeGrid& grid, int substeps) {
    const OracleResult res = rk4_propagator(spec, grid, substeps);
    double worst = 0.0;
    for (int i = 0; i < grid.n_nodes; ++i)
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                worst = std::max(worst, std::abs(res.at(i, r, c) -
                                                 k2_ref(r, c, grid.node(i))));
    return worst;
}

} // namespace

TEST_CASE("rk4 converges at fourth order on a solvable system") {
    const MatrixSpec spec = k2_spec(1.0);
    const TimeGrid grid = spec.grid(26);
    const double e1 = rk4_err(spec, grid, 1);
    const double e2 = rk4_err(spec, grid, 2);
    CHECK(e1 <= 1e-5);
    CHECK(e1 / e2 >= 12.0);
    CHECK(e1 / e2 <= 22.0);
}

TEST_CASE("rk4 on a zero matrix returns the identity exactly") {
    MatrixSpec s(2, 0.0, 1.0);
    s.add_entry(0, 1, "0");
    const TimeGrid grid = s.grid(11);
    const OracleResult res = rk4_propagator(s, grid, 3);
    CHECK(res.method == "rk4");
    for (int i = 0; i < grid.n_nodes; ++i)
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                CHECK(res.at(i, r, c) == (r == c ? 1.0 : 0.0));
}

TEST_CASE("rk4 reports overflow as a numeric failure") {
    MatrixSpec s(1, 0.0, 1.0);
    s.add_entry(0, 0, "1e8"); // growth rate far past double range over [0,1]
    bool threw = false;
    try {
        rk4_propagator(s, s.grid(101), 2);
    } catch (const NumericError& e) {
        threw = true;
        CHECK(std::string(e.what()).find("rk4") != std::string::npos);
    }
    CHECK(threw);
}

TEST_CASE("truncated series at order zero is the identity") {
    const MatrixSpec spec = k2_spec(1.0);
    const TimeGrid grid = spec.grid(21);
    const OracleResult res = neumann_truncated(spec, grid, 0);
    for (int i = 0; i < grid.n_nodes; ++i)
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                CHECK(res.at(i, r, c) == (r == c ? 1.0 : 0.0));
}

TEST_CASE("truncated series converges to the closed form") {
    const MatrixSpec spec = k2_spec(1.0);
    const TimeGrid grid = spec.grid(201);
    const int order = neumann_order_for_tolerance(spec, grid, 1e-10);
    const OracleResult res = neumann_truncated(spec, grid, order);
    CHECK(res.order == order);
    double worst = 0.0;
    for (int i = 0; i < grid.n_nodes; ++i)
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                worst = std::max(worst, std::abs(res.at(i, r, c) -
                                                 k2_ref(r, c, grid.node(i))));
    // remaining error is pure quadrature, second order in the grid spacing
    CHECK(worst <= 5e-4);

    const OracleResult low = neumann_truncated(spec, grid, 2);
    double worst_low = 0.0;
    for (int i = 0; i < grid.n_nodes; ++i)
        worst_low = std::max(worst_low, std::abs(low.at(i, 0, 0) -
                                                 k2_ref(0, 0, grid.node(i))));
    CHECK(worst_low > 10.0 * worst); // low order is visibly truncated
}

TEST_CASE("series order selection") {
    MatrixSpec zero(2, 0.0, 1.0);
    zero.add_entry(0, 0, "0");
    CHECK(neumann_order_for_tolerance(zero, zero.grid(11)) == 0);

    const MatrixSpec spec = k2_spec(1.0);
    const TimeGrid grid = spec.grid(101);
    const int loose = neumann_order_for_tolerance(spec, grid, 1e-4);
    const int tight = neumann_order_for_tolerance(spec, grid, 1e-12);
    CHECK(loose >= 1);
    CHECK(tight > loose);

    MatrixSpec hot(1, 0.0, 10.0);
    hot.add_entry(0, 0, "100"); // tail bound never reaches the cap
    CHECK_THROWS_AS(neumann_order_for_tolerance(hot, hot.grid(11), 1e-10),
                    NumericError);
}

TEST_CASE("matrix exponential basics") {
    const std::vector<double> zero(9, 0.0);
    const std::vector<double> ez = matrix_exp(zero, 3);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            CHECK(ez[static_cast<std::size_t>(r) * 3 + c] == (r == c ? 1.0 : 0.0));

    const std::vector<double> diag{1.0, 0.0, 0.0, 2.0};
    const std::vector<double> ed = matrix_exp(diag, 2);
    CHECK(ed[0] == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
    CHECK(ed[3] == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
    CHECK(ed[1] == 0.0);
    CHECK(ed[2] == 0.0);

    // nilpotent: exp([[0,1],[0,0]]) = I + N with no truncation error
    const std::vector<double> nil{0.0, 1.0, 0.0, 0.0};
    const std::vector<double> en = matrix_exp(nil, 2);
    CHECK(en[0] == 1.0);
    CHECK(en[1] == 1.0);
    CHECK(en[2] == 0.0);
    CHECK(en[3] == 1.0);

    const double th = 1.3;
    const std::vector<double> rot{0.0, -th, th, 0.0};
    const std::vector<double> er = matrix_exp(rot, 2);
    CHECK(er[0] == doctest::Approx(std::cos(th)).epsilon(1e-13));
    CHECK(er[1] == doctest::Approx(-std::sin(th)).epsilon(1e-13));
    CHECK(er[2] == doctest::Approx(std::sin(th)).epsilon(1e-13));
    CHECK(er[3] == doctest::Approx(std::cos(th)).epsilon(1e-13));
}

TEST_CASE("matrix exponential group law on a stiff example") {
    // exp(A) = exp(A/2)^2 with A requiring several scaling steps
    std::vector<double> a{3.0, -7.0, 2.5, 4.0, 0.5, -1.0, 6.0, -2.0, 1.0};
    std::vector<double> half = a;
    for (double& v : half) v *= 0.5;
    const std::vector<double> ea = matrix_exp(a, 3);
    const std::vector<double> eh = matrix_exp(half, 3);
    double scale = 0.0;
    for (double v : ea) scale = std::max(scale, std::abs(v));
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k)
                s += eh[static_cast<std::size_t>(r) * 3 + k] *
                     eh[static_cast<std::size_t>(k) * 3 + c];
            CHECK(std::abs(s - ea[static_cast<std::size_t>(r) * 3 + c]) <=
                  1e-12 * scale);
        }
    }
}

namespace {

// Series re-summed in long double with its own ladder, nothing shared.
long double hyp0f2_brute(long double b1, long double b2, long double z) {
    long double sum = 1.0L, term = 1.0L;
    for (int k = 0; k < 200; ++k) {
        term *= z / ((b1 + k) * (b2 + k) * (k + 1));
        sum += term;
        if (std::abs(term) < 1e-22L * std::abs(sum)) break;
    }
    return sum;
}

long double bessel_brute(int nu, long double x) {
    long double sum = 0.0L;
    for (int m = 0; m < 200; ++m) {
        long double term = 1.0L;
        for (int j = 1; j <= m; ++j) term *= (x / 2) / j;
        for (int j = 1; j <= m + nu; ++j) term *= (x / 2) / j;
        sum += term;
        if (m > 3 && term < 1e-22L * sum) break;
    }
    return sum;
}

} // namespace

TEST_CASE("hypergeometric 0F2 series") {
    CHECK(hyp0f2(0.25, 0.5, 0.0) == 1.0);
    for (double z : {0.1, 1.0, 5.0, 40.0, -2.0}) {
        for (auto [b1, b2] : {std::pair{0.25, 0.5}, {0.5, 0.75}, {1.25, 1.5}}) {
            const double got = hyp0f2(b1, b2, z);
            const double want = static_cast<double>(hyp0f2_brute(b1, b2, z));
            CHECK(std::abs(got - want) <= 1e-13 * std::max(1.0, std::abs(want)));
        }
    }
    CHECK_THROWS_AS(hyp0f2(0.0, 0.5, 1.0), InputError);
    CHECK_THROWS_AS(hyp0f2(0.5, -3.0, 1.0), InputError);
    CHECK(hyp0f2(0.5, -2.5, 0.5) > 0.0); // negative non-integer is a valid parameter
}

TEST_CASE("modified Bessel function of integer order") {
    CHECK(bessel_i(0, 0.0) == 1.0);
    CHECK(bessel_i(3, 0.0) == 0.0);
    for (int nu = 0; nu <= 8; ++nu) {
        for (double x : {0.3, 2.0, 7.5}) {
            const double got = bessel_i(nu, x);
            const double want = static_cast<double>(bessel_brute(nu, x));
            CHECK(std::abs(got - want) <= 1e-13 * std::max(1.0, want));
        }
    }
    // downward recurrence ties three consecutive orders together
    for (int nu = 1; nu <= 5; ++nu) {
        const double x = 2.0;
        const double lhs = bessel_i(nu - 1, x) - bessel_i(nu + 1, x);
        const double rhs = 2.0 * nu / x * bessel_i(nu, x);
        CHECK(std::abs(lhs - rhs) <= 1e-12);
    }
    CHECK(bessel_i(-2, 1.5) == bessel_i(2, 1.5));
    CHECK(bessel_i(1, -2.0) == -bessel_i(1, 2.0));
    CHECK(bessel_i(2, -2.0) == bessel_i(2, 2.0));
}
