#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hybridmem/errors.hpp"
#include "hybridmem/linalg.hpp"
#include "hybridmem/model.hpp"

using namespace hybridmem;
using namespace hybridmem::model;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

SystemConfig gamma_config(double omega = 50.0, double g = 1.0, double j = 1.0)
{
    SystemConfig cfg;
    cfg.qubit_c.omega = omega;
    cfg.qubit_m.omega = omega;
    cfg.nve.omega_nv = omega;
    cfg.nve.g = g;
    cfg.j_t = j;
    cfg.alpha = Complex(1.0 / std::sqrt(3.0), 0.0);
    cfg.beta = Complex(std::sqrt(2.0 / 3.0), 0.0);
    return cfg;
}

DriveParams fig7_drive()
{
    DriveParams p;
    p.i_ext = 700e-9;
    p.d_c = 1.2e-6;
    p.d_n = 8e-6;
    p.loop_side = 2e-6;
    p.persistent_current = 60e-9;
    return p;
}

} // namespace

TEST_CASE("nv_transition_frequency")
{
    const double d = kTwoPi * 2.88e9;
    CHECK(nv_transition_frequency(d, 2.0, 0.0) == d);

    // 0.01 T Zeeman shift with the pinned constants
    CHECK(nv_transition_frequency(d, 2.0, 0.01)
          == doctest::Approx(16336802586.630554).epsilon(1e-12));

    // gap closes exactly at B* = D hbar/(g_e mu_B)
    const double b_star = d * constants::hbar / (2.0 * constants::mu_bohr);
    CHECK_THROWS_AS(nv_transition_frequency(d, 2.0, b_star), ConfigError);
}

TEST_CASE("field_at_distance")
{
    CHECK(field_at_distance(0.0, 1e-6) == 0.0);
    CHECK(field_at_distance(700e-9, 1.2e-6)
          == doctest::Approx(1.1666666666666668e-07).epsilon(1e-14));
    CHECK(field_at_distance(700e-9, 8e-6) == doctest::Approx(1.75e-08).epsilon(1e-14));
    CHECK_THROWS_AS(field_at_distance(1e-9, 0.0), ConfigError);
    CHECK_THROWS_AS(field_at_distance(1e-9, -1.0), ConfigError);
}

TEST_CASE("rabi_frequency_qubit")
{
    DriveParams p = fig7_drive();
    CHECK(rabi_frequency_qubit(p) == doctest::Approx(265503508.4392186).epsilon(1e-12));

    DriveParams zero = p;
    zero.i_ext = 0.0;
    CHECK(rabi_frequency_qubit(zero) == 0.0);

    DriveParams far = p;
    far.d_c = 2.0 * p.d_c;
    CHECK(rabi_frequency_qubit(far)
          == doctest::Approx(0.5 * rabi_frequency_qubit(p)).epsilon(1e-14));

    p.rabi_c_override = kTwoPi * 35e6;
    CHECK(effective_rabi_c(p) == kTwoPi * 35e6);
}

TEST_CASE("rabi_frequency_nve")
{
    DriveParams p = fig7_drive();
    CHECK(rabi_frequency_nve(p, 1e6, 2.0)
          == doctest::Approx(3077849.4215816427).epsilon(1e-12));
    CHECK(rabi_frequency_nve(p, 4.0, 2.0)
          == doctest::Approx(2.0 * rabi_frequency_nve(p, 1.0, 2.0)).epsilon(1e-14));

    DriveParams far = p;
    far.d_n = 1e-2;  // 10 mm: rotations on the memory all but vanish
    CHECK(rabi_frequency_nve(far, 1e6, 2.0) < 1e-3 * rabi_frequency_nve(p, 1e6, 2.0));
}

TEST_CASE("effective_lambda")
{
    CHECK(effective_lambda(1.0, 1.0, 10.0, 10.0) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(effective_lambda(0.0, 1.0, 10.0, 10.0) == 0.0);
    CHECK(effective_lambda(1.0, 1.0, 10.0, 20.0) == doctest::Approx(0.075).epsilon(1e-14));
    CHECK_THROWS_AS(effective_lambda(1.0, 1.0, 0.0, 10.0), ConfigError);
    CHECK_THROWS_AS(effective_lambda(1.0, 1.0, 10.0, 0.0), ConfigError);
}

TEST_CASE("build_h_rwa diagonal limit and single-excitation block")
{
    SystemConfig cfg = gamma_config(1.0, 0.0, 0.0);
    cfg.qubit_c.omega = 1.0;
    cfg.qubit_m.omega = 2.0;
    cfg.nve.omega_nv = 3.0;
    const ComplexMatrix h = build_h_rwa(cfg, 0.0);
    for (int ic = 0; ic < 2; ++ic) {
        for (int im = 0; im < 2; ++im) {
            for (int ib = 0; ib < 2; ++ib) {
                const int k = basis_index(ic, im, ib, 2);
                CHECK(h(k, k).real()
                      == doctest::Approx(1.0 * ic + 2.0 * im + 3.0 * ib).epsilon(1e-14));
            }
        }
    }
    CHECK(h.cwiseAbs().sum() == doctest::Approx(h.diagonal().cwiseAbs().sum()));

    // omega_C = omega_M = omega_NV = 1, g = J_t = 1: the single-excitation
    // block is I + the symmetric chain, eigenvalues 1 - sqrt(2), 1, 1 + sqrt(2)
    SystemConfig res = gamma_config(1.0, 1.0, 1.0);
    const ComplexMatrix hr = build_h_rwa(res, 0.0);
    const int phi1 = basis_index(1, 0, 0, 2);
    const int phi2 = basis_index(0, 1, 0, 2);
    const int phi3 = basis_index(0, 0, 1, 2);
    ComplexMatrix block(3, 3);
    const int idx[3] = {phi1, phi2, phi3};
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            block(a, b) = hr(idx[a], idx[b]);
        }
    }
    const auto es = linalg::eig_hermitian(block);
    CHECK(es.values(0) == doctest::Approx(1.0 - std::sqrt(2.0)).epsilon(1e-12));
    CHECK(es.values(1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(es.values(2) == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("build_h_rwa is Hermitian and conserves excitation number")
{
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> freq(0.5, 60.0);
    std::uniform_real_distribution<double> coup(0.0, 3.0);
    for (int rep = 0; rep < 100; ++rep) {
        SystemConfig cfg = gamma_config();
        cfg.qubit_c.omega = freq(rng);
        cfg.qubit_m.omega = freq(rng);
        cfg.nve.omega_nv = freq(rng);
        cfg.nve.g = coup(rng);
        cfg.j_t = coup(rng);
        cfg.nve.fock_cutoff = 2 + rep % 3;
        const ComplexMatrix h = build_h_rwa(cfg, 0.0);
        CHECK(linalg::hermiticity_defect(h) < 1e-12);
        const ComplexMatrix n = excitation_number(cfg.nve.fock_cutoff);
        CHECK((h * n - n * h).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("build_h_rwa honors schedule and rejects negative time")
{
    SystemConfig cfg = gamma_config();
    Schedule sched;
    sched.omega_m = OmegaRamp{70.0, 50.0, 2.0, RampShape::Linear};
    sched.j_t = {{0.0, 1.0}, {5.0, 0.0}};
    cfg.schedule = sched;

    const ComplexMatrix h0 = build_h_rwa(cfg, 0.0);
    const int phi2 = basis_index(0, 1, 0, 2);
    CHECK(h0(phi2, phi2).real() == doctest::Approx(70.0));
    const ComplexMatrix h1 = build_h_rwa(cfg, 1.0);
    CHECK(h1(phi2, phi2).real() == doctest::Approx(60.0));
    const ComplexMatrix h9 = build_h_rwa(cfg, 9.0);
    CHECK(h9(phi2, phi2).real() == doctest::Approx(50.0));
    // J_t switches off at t = 5
    const int phi1 = basis_index(1, 0, 0, 2);
    CHECK(std::abs(h9(phi1, phi2)) == doctest::Approx(0.0));
    CHECK(std::abs(h1(phi1, phi2)) == doctest::Approx(1.0));

    CHECK_THROWS_AS(build_h_rwa(cfg, -0.1), ConfigError);
}

TEST_CASE("build_h_rwa applies the drive only inside its window")
{
    SystemConfig cfg = gamma_config();
    Schedule sched;
    sched.drive_window = DriveWindow{1.0, 2.0, 0.3, 0.05};
    cfg.schedule = sched;
    const ComplexMatrix inside = build_h_rwa(cfg, 1.5);
    const ComplexMatrix outside = build_h_rwa(cfg, 2.5);
    const ComplexMatrix diff = inside - outside;
    const int vac = basis_index(0, 0, 0, 2);
    CHECK(std::abs(diff(vac, basis_index(1, 0, 0, 2)) - Complex(0.3, 0.0)) < 1e-14);
    CHECK(std::abs(diff(vac, basis_index(0, 0, 1, 2)) - Complex(0.05, 0.0)) < 1e-14);
    const ComplexMatrix n = excitation_number(2);
    CHECK((inside * n - n * inside).cwiseAbs().maxCoeff() > 1e-3);
    CHECK((outside * n - n * outside).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("build_h_resonant structure")
{
    CHECK(build_h_resonant(0.0, 0.0, 2).cwiseAbs().maxCoeff() == 0.0);

    const double g = 0.7;
    const double j = 1.3;
    const ComplexMatrix h = build_h_resonant(g, j, 2);
    const int phi1 = basis_index(1, 0, 0, 2);
    const int phi2 = basis_index(0, 1, 0, 2);
    const int phi3 = basis_index(0, 0, 1, 2);
    CHECK(h(phi2, phi1).real() == doctest::Approx(j));
    CHECK(h(phi3, phi2).real() == doctest::Approx(g));
    CHECK(std::abs(h(phi3, phi1)) == 0.0);
    CHECK(h.diagonal().cwiseAbs().maxCoeff() == 0.0);

    // J_t = 0 decouples the computing qubit entirely
    const ComplexMatrix h2 = build_h_resonant(1.0, 0.0, 2);
    for (int k = 0; k < 8; ++k) {
        if (k != phi1) {
            CHECK(std::abs(h2(k, phi1)) == 0.0);
        }
    }
    CHECK(std::abs(h2(phi3, phi2)) == doctest::Approx(1.0));
}

TEST_CASE("build_h_dispersive diagonal shifts and coupling")
{
    SystemConfig cfg = gamma_config(50.0, 1.0, 1.0);
    cfg.qubit_c.omega = 40.0;
    cfg.nve.omega_nv = 40.0;  // Delta_C = Delta_NV = 10
    const ComplexMatrix h = build_h_dispersive(cfg);
    REQUIRE(h.rows() == 4);
    const int c_exc = basis_index_cn(1, 0, 2);
    const int b_exc = basis_index_cn(0, 1, 2);
    CHECK(h(c_exc, c_exc).real() == doctest::Approx(10.1).epsilon(1e-14));
    CHECK(h(b_exc, b_exc).real() == doctest::Approx(10.1).epsilon(1e-14));
    CHECK(h(c_exc, b_exc).real() == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(linalg::hermiticity_defect(h) < 1e-15);

    // g = 0 leaves a pure diagonal
    SystemConfig diag = cfg;
    diag.nve.g = 0.0;
    const ComplexMatrix hd = build_h_dispersive(diag);
    CHECK(std::abs(hd(c_exc, b_exc)) == 0.0);

    SystemConfig bad = cfg;
    bad.qubit_c.omega = 50.0;  // Delta_C = 0
    CHECK_THROWS_AS(build_h_dispersive(bad), ConfigError);

    CHECK(dispersive_regime_valid(cfg));
    SystemConfig close = cfg;
    close.qubit_c.omega = 47.0;
    CHECK_FALSE(dispersive_regime_valid(close));
}

TEST_CASE("build_h_single swaps the excitation in a quarter period")
{
    CHECK(build_h_single(0.0, 2).cwiseAbs().maxCoeff() == 0.0);

    const double g = 1.0;
    const ComplexMatrix h = build_h_single(g, 2);
    const ComplexMatrix n2 = excitation_number_cn(2);
    CHECK((h * n2 - n2 * h).cwiseAbs().maxCoeff() < 1e-12);

    ComplexVector psi = ComplexVector::Zero(4);
    psi(basis_index_cn(1, 0, 2)) = 1.0;
    const ComplexMatrix u =
        linalg::unitary_from_hamiltonian(h, std::numbers::pi / (2.0 * g));
    const ComplexVector out = u * psi;
    CHECK(std::abs(out(basis_index_cn(0, 1, 2)) - Complex(0.0, -1.0)) < 1e-12);
    CHECK(std::norm(out(basis_index_cn(0, 1, 2))) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("build_h_lab spectrum and broken excitation conservation")
{
    SystemConfig cfg = gamma_config(1.0, 0.0, 0.0);
    cfg.qubit_c.omega = 1.0;
    cfg.qubit_m.omega = 2.0;
    cfg.nve.omega_nv = 3.0;
    const auto es = linalg::eig_hermitian(build_h_lab(cfg));
    std::vector<double> expected;
    for (double ec : {-0.5, 0.5}) {
        for (double em : {-1.0, 1.0}) {
            for (double eb : {0.0, 3.0}) {
                expected.push_back(ec + em + eb);
            }
        }
    }
    std::sort(expected.begin(), expected.end());
    for (int k = 0; k < 8; ++k) {
        CHECK(es.values(k) == doctest::Approx(expected[k]).epsilon(1e-12));
    }

    SystemConfig coupled = gamma_config(1.0, 0.3, 0.0);
    const ComplexMatrix h = build_h_lab(coupled);
    const ComplexMatrix n = excitation_number(2);
    CHECK((h * n - n * h).cwiseAbs().maxCoeff() > 0.1);
}

TEST_CASE("lab_to_eigen_basis diagonalizes the bare flux qubits")
{
    SystemConfig cfg = gamma_config(2.0, 0.0, 0.0);
    const ComplexMatrix w = lab_to_eigen_basis(2);
    const ComplexMatrix h_eig = w.adjoint() * build_h_lab(cfg) * w;
    // 2 n_C + 2 n_M + 2 n_b - 2 I up to rounding
    const ComplexMatrix expected =
        2.0 * excitation_number(2) - 2.0 * ComplexMatrix::Identity(8, 8);
    CHECK((h_eig - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("build_drive_terms amplitudes and rotation")
{
    DriveParams p = fig7_drive();
    DriveParams off = p;
    off.i_ext = 0.0;
    CHECK(build_drive_terms(off, 1e6, 2.0, 2).cwiseAbs().maxCoeff() == 0.0);

    // leakage-to-control amplitude ratio at the 8 um geometry
    const double ratio = rabi_frequency_nve(p, 1e6, 2.0) / rabi_frequency_qubit(p);
    CHECK(ratio == doctest::Approx(0.0115925).epsilon(1e-9));

    // resonant drive rotates the computing qubit as cos - i sin
    DriveParams remote = p;
    remote.d_n = 1e9;  // suppress the memory leakage term entirely
    const double omega_c = rabi_frequency_qubit(remote);
    const ComplexMatrix h = build_drive_terms(remote, 1e6, 2.0, 2);
    const double t = 0.34 / omega_c;
    ComplexVector vac = ComplexVector::Zero(8);
    vac(basis_index(0, 0, 0, 2)) = 1.0;
    const ComplexVector out = linalg::unitary_from_hamiltonian(h, t) * vac;
    CHECK(std::abs(out(basis_index(0, 0, 0, 2)) - Complex(std::cos(0.34), 0.0)) < 1e-9);
    CHECK(std::abs(out(basis_index(1, 0, 0, 2)) - Complex(0.0, -std::sin(0.34))) < 1e-9);
}

TEST_CASE("collapse_operators")
{
    SystemConfig cfg = gamma_config();
    auto zeros = collapse_operators(cfg);
    REQUIRE(zeros.size() == 2);
    CHECK(zeros[0].cwiseAbs().maxCoeff() == 0.0);
    CHECK(zeros[1].cwiseAbs().maxCoeff() == 0.0);

    cfg.qubit_m.decay_rate = 0.04;
    cfg.qubit_c.decay_rate = 0.01;
    auto ls = collapse_operators(cfg);
    CHECK(ls[0].cwiseAbs().maxCoeff() == doctest::Approx(0.2));
    CHECK(ls[1].cwiseAbs().maxCoeff() == doctest::Approx(0.1));

    SystemConfig twice = cfg;
    twice.qubit_m.decay_rate = 0.08;
    auto ls2 = collapse_operators(twice);
    CHECK((ls2[0] - std::sqrt(2.0) * ls[0]).cwiseAbs().maxCoeff() < 1e-15);

    ComplexVector vac = ComplexVector::Zero(8);
    vac(basis_index(0, 0, 0, 2)) = 1.0;
    CHECK((ls[0] * vac).norm() == 0.0);
    CHECK((ls[1] * vac).norm() == 0.0);
}

TEST_CASE("basis ordering contract for the single-excitation states")
{
    for (int nc : {2, 3, 5}) {
        CHECK(basis_index(1, 0, 0, nc) == 2 * nc);
        CHECK(basis_index(0, 1, 0, nc) == nc);
        CHECK(basis_index(0, 0, 1, nc) == 1);
        // embeddings agree with the index formula
        ComplexVector vac = ComplexVector::Zero(4 * nc);
        vac(0) = 1.0;
        const ComplexVector c_exc = embed_c(qubit_sigma_plus(), nc) * vac;
        CHECK(std::abs(c_exc(2 * nc) - Complex(1.0, 0.0)) < 1e-15);
        const ComplexVector m_exc = embed_m(qubit_sigma_plus(), nc) * vac;
        CHECK(std::abs(m_exc(nc) - Complex(1.0, 0.0)) < 1e-15);
        const ComplexVector b_exc =
            embed_nve(boson_annihilation(nc).adjoint(), nc) * vac;
        CHECK(std::abs(b_exc(1) - Complex(1.0, 0.0)) < 1e-15);
    }
}

TEST_CASE("config validation catches broken invariants")
{
    SystemConfig ok = gamma_config();
    CHECK_NOTHROW(ok.validate());

    SystemConfig cutoff = ok;
    cutoff.nve.fock_cutoff = 1;
    CHECK_THROWS_AS(cutoff.validate(), ConfigError);

    SystemConfig norm = ok;
    norm.alpha = Complex(1.0, 0.0);
    norm.beta = Complex(1.0, 0.0);
    CHECK_THROWS_AS(norm.validate(), ConfigError);

    SystemConfig neg = ok;
    neg.qubit_c.decay_rate = -1.0;
    CHECK_THROWS_AS(neg.validate(), ConfigError);

    // omega_nv must reproduce its SI anchors when they are present
    SystemConfig anchored = ok;
    anchored.nve.zero_field_d = kTwoPi * 2.88e9;
    anchored.nve.b_ext_z = 0.01;
    anchored.nve.omega_nv = 16336802586.630554;
    anchored.qubit_c.omega = anchored.nve.omega_nv;
    anchored.qubit_m.omega = anchored.nve.omega_nv;
    CHECK_NOTHROW(anchored.validate());
    anchored.nve.omega_nv = 16336802586.630554 * 1.001;
    CHECK_THROWS_AS(anchored.validate(), ConfigError);
}

TEST_CASE("schedule invariants")
{
    Schedule s;
    s.omega_m = OmegaRamp{70.0, 50.0, -1.0, RampShape::Linear};
    CHECK_THROWS_AS(s.validate(), ConfigError);

    Schedule seg;
    seg.j_t = {{0.0, 1.0}, {0.0, 2.0}};
    CHECK_THROWS_AS(seg.validate(), ConfigError);

    Schedule win;
    win.drive_window = DriveWindow{2.0, 1.0, 0.1, 0.1};
    CHECK_THROWS_AS(win.validate(), ConfigError);

    // cosine ramp is continuous at both ends
    Schedule cosine;
    cosine.omega_m = OmegaRamp{70.0, 50.0, 2.0, RampShape::Cosine};
    CHECK(cosine.omega_m_at(0.0, 0.0) == doctest::Approx(70.0).epsilon(1e-12));
    CHECK(cosine.omega_m_at(2.0 - 1e-9, 0.0) == doctest::Approx(50.0).epsilon(1e-6));
    CHECK(cosine.omega_m_at(5.0, 0.0) == doctest::Approx(50.0));
}

TEST_CASE("truncation invariance for one-excitation dynamics")
{
    // same single-excitation physics at cutoff 2 and 4
    const ComplexMatrix h2 = build_h_resonant(1.0, 1.0, 2);
    const ComplexMatrix h4 = build_h_resonant(1.0, 1.0, 4);
    const double t = 1.234;
    ComplexVector psi2 = ComplexVector::Zero(8);
    psi2(basis_index(1, 0, 0, 2)) = 1.0;
    ComplexVector psi4 = ComplexVector::Zero(16);
    psi4(basis_index(1, 0, 0, 4)) = 1.0;
    const ComplexVector out2 = linalg::unitary_from_hamiltonian(h2, t) * psi2;
    const ComplexVector out4 = linalg::unitary_from_hamiltonian(h4, t) * psi4;
    CHECK(std::abs(out2(basis_index(0, 0, 1, 2)) - out4(basis_index(0, 0, 1, 4))) < 1e-12);
    CHECK(std::abs(out2(basis_index(0, 1, 0, 2)) - out4(basis_index(0, 1, 0, 4))) < 1e-12);
    CHECK(std::abs(out2(basis_index(1, 0, 0, 2)) - out4(basis_index(1, 0, 0, 4))) < 1e-12);
}
