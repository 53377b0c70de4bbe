#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

#include "hybridmem/analytic.hpp"
#include "hybridmem/errors.hpp"
#include "hybridmem/experiments.hpp"

using namespace hybridmem;
using namespace hybridmem::experiments;

namespace {

constexpr double kPi = std::numbers::pi;

model::SystemConfig fig2_config()
{
    model::SystemConfig cfg;
    cfg.qubit_c.omega = 50.0;
    cfg.qubit_m.omega = 50.0;
    cfg.nve.omega_nv = 50.0;
    cfg.nve.g = 1.0;
    cfg.j_t = 1.0;
    cfg.alpha = Complex(1.0 / std::sqrt(3.0), 0.0);
    cfg.beta = Complex(std::sqrt(2.0 / 3.0), 0.0);
    return cfg;
}

model::SystemConfig fig5_config()
{
    model::SystemConfig cfg = fig2_config();
    cfg.qubit_c.omega = 40.0;
    cfg.nve.omega_nv = 40.0;  // Delta_C = Delta_NV = 10
    return cfg;
}

model::SystemConfig fig7_config()
{
    model::SystemConfig cfg;
    cfg.unit.mode = model::UnitSystem::Mode::SiAngular;
    const double g = 2.0 * kPi * 35e6;
    cfg.qubit_c.omega = 2.0 * kPi * 2.53e9;
    cfg.qubit_m.omega = cfg.qubit_c.omega;
    cfg.nve.omega_nv = cfg.qubit_c.omega;
    cfg.nve.g = g;
    cfg.j_t = g;
    cfg.alpha = Complex(1.0, 0.0);
    cfg.beta = Complex(0.0, 0.0);
    model::DriveParams drive;
    drive.i_ext = 700e-9;
    drive.d_c = 1.2e-6;
    drive.d_n = 8e-6;
    drive.loop_side = 2e-6;
    drive.persistent_current = 60e-9;
    drive.rabi_c_override = g;
    cfg.drive = drive;
    return cfg;
}

int argmax(const std::vector<double>& v)
{
    return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

} // namespace

TEST_CASE("target_state conventions")
{
    const Complex alpha(1.0 / std::sqrt(3.0), 0.0);
    const Complex beta(std::sqrt(2.0 / 3.0), 0.0);

    const ComplexVector literal =
        target_state(alpha, beta, TargetConvention::Literal, TransferKind::Resonant, 2);
    CHECK(std::abs(literal(0) - alpha) < 1e-15);
    CHECK(std::abs(literal(1) - beta) < 1e-15);
    CHECK(literal.norm() == doctest::Approx(1.0));

    const ComplexVector corrected = target_state(alpha, beta, TargetConvention::PhaseCorrected,
                                                 TransferKind::Resonant, 2);
    CHECK(std::abs(corrected(1) + beta) < 1e-15);

    const ComplexVector disp = target_state(alpha, beta, TargetConvention::PhaseCorrected,
                                            TransferKind::Dispersive, 2);
    CHECK(std::abs(disp(1) - beta * Complex(0.0, -1.0)) < 1e-15);

    // beta = 0 is the vacuum in every convention
    const ComplexVector vac =
        target_state(Complex(1.0, 0.0), Complex(0.0, 0.0), TargetConvention::Literal,
                     TransferKind::Resonant, 2);
    const ComplexVector vac2 =
        target_state(Complex(1.0, 0.0), Complex(0.0, 0.0), TargetConvention::PhaseCorrected,
                     TransferKind::Dispersive, 2);
    CHECK((vac - vac2).norm() == 0.0);
    CHECK(std::abs(vac(0) - Complex(1.0, 0.0)) < 1e-15);

    CHECK_THROWS_AS(target_state(Complex(1.0, 0.0), Complex(1.0, 0.0),
                                 TargetConvention::Literal, TransferKind::Resonant, 2),
                    ConfigError);
}

TEST_CASE("fidelity basics")
{
    const ComplexVector t = target_state(Complex(1.0 / std::sqrt(3.0), 0.0),
                                         Complex(std::sqrt(2.0 / 3.0), 0.0),
                                         TargetConvention::Literal, TransferKind::Resonant, 2);
    CHECK(fidelity(t, t) == doctest::Approx(1.0).epsilon(1e-14));

    ComplexVector orth = ComplexVector::Zero(8);
    orth(model::basis_index(0, 1, 0, 2)) = 1.0;
    CHECK(fidelity(orth, t) == doctest::Approx(0.0));

    const model::SystemConfig cfg = fig2_config();
    CHECK(fidelity(initial_state_full(cfg), t) == doctest::Approx(1.0 / 9.0).epsilon(1e-12));

    const ComplexMatrix rho = t * t.adjoint();
    CHECK(fidelity(rho, t) == doctest::Approx(1.0).epsilon(1e-12));

    ComplexVector small = ComplexVector::Zero(4);
    small(0) = 1.0;
    CHECK_THROWS_AS(fidelity(small, t), ConfigError);
}

TEST_CASE("resonant storage trajectory")
{
    const model::SystemConfig cfg = fig2_config();
    const dynamics::Trajectory traj = run_resonant_storage(cfg, {}, 2001);
    REQUIRE(traj.size() == 2001);
    const double t_star = analytic::resonant_transfer_time(1.0);
    // grid covers [0, 4 t*], so t* sits exactly at index 500
    CHECK(traj.times[500] == doctest::Approx(t_star).epsilon(1e-12));
    CHECK(traj.fidelity[0] == doctest::Approx(1.0 / 9.0).epsilon(1e-9));
    CHECK(traj.fidelity[500] >= 0.999999);
    // periodicity: one full revival two transfer times later
    for (int k : {0, 123, 456}) {
        CHECK(std::abs(traj.fidelity[k] - traj.fidelity[k + 1000]) < 1e-6);
    }
    // stored population at the transfer point
    CHECK(traj.pop_nve[500] == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    CHECK(traj.pop_m[500] == doctest::Approx(0.0).epsilon(1e-9));

    // the Literal convention pins the transfer-phase contrast
    RunOptions literal;
    literal.convention = TargetConvention::Literal;
    const dynamics::Trajectory lit = run_resonant_storage(cfg, literal, 2001);
    CHECK(lit.fidelity[500] == doctest::Approx(1.0 / 9.0).epsilon(1e-6));

    model::SystemConfig detuned = cfg;
    detuned.qubit_m.omega = 51.0;
    CHECK_THROWS_AS(run_resonant_storage(detuned), ConfigError);
}

TEST_CASE("ramp sweep: instant-ramp limit, monotonic detuning cost, errors")
{
    const model::SystemConfig cfg = fig2_config();
    const SweepResult fast = run_ramp_sweep(cfg, {1e-3}, {20.0});
    const dynamics::Trajectory base = run_resonant_storage(cfg, {}, 4001);
    const double base_max = *std::max_element(base.fidelity.begin(), base.fidelity.end());
    CHECK(std::abs(fast.grid[0] - base_max) < 1e-3);

    // deeper initial detuning costs fidelity (short-ramp regime; long ramps
    // develop interference that breaks the ordering)
    const SweepResult sweep = run_ramp_sweep(cfg, {0.1}, {5.0, 10.0, 20.0, 40.0});
    REQUIRE(sweep.grid.size() == 4);
    CHECK(sweep.grid[0] >= sweep.grid[1] - 1e-9);
    CHECK(sweep.grid[1] >= sweep.grid[2] - 1e-9);
    CHECK(sweep.grid[2] >= sweep.grid[3] - 1e-9);

    CHECK_THROWS_AS(run_ramp_sweep(cfg, {-0.1}, {20.0}), ConfigError);
    CHECK_THROWS_AS(run_ramp_sweep(cfg, {}, {20.0}), ConfigError);

    model::SystemConfig offres = cfg;
    offres.nve.omega_nv = 49.0;
    CHECK_THROWS_AS(run_ramp_sweep(offres, {0.1}, {20.0}), ConfigError);
}

TEST_CASE("detuning heatmap: center consistency, peak location, continuity")
{
    const model::SystemConfig cfg = fig2_config();

    SweepSpec center;
    center.axes = {{"delta_c", {0.0}}, {"delta_nv", {0.0}}};
    center.reduction = Reduction::AtNominalTransferTime;
    const SweepResult single = run_detuning_heatmap(cfg, center);
    const dynamics::Trajectory base = run_resonant_storage(cfg, {}, 2001);
    CHECK(std::abs(single.grid[0] - base.fidelity[500]) < 1e-12);

    SweepSpec spec;
    std::vector<double> vals;
    for (int k = -2; k <= 2; ++k) {
        vals.push_back(static_cast<double>(k));
    }
    spec.axes = {{"delta_c", vals}, {"delta_nv", vals}};
    spec.reduction = Reduction::AtNominalTransferTime;
    const SweepResult grid = run_detuning_heatmap(cfg, spec);
    CHECK(argmax(grid.grid) == 12);  // center of the 5x5 grid

    SweepSpec fine;
    fine.axes = {{"delta_c", {1.9, 2.0}}, {"delta_nv", {2.0}}};
    fine.reduction = Reduction::AtNominalTransferTime;
    const SweepResult edge = run_detuning_heatmap(cfg, fine);
    CHECK(std::abs(edge.grid[0] - edge.grid[1]) < 0.2);

    SweepSpec mismatch;
    mismatch.axes = {{"delta", {0.0}}, {"lambda", {0.0, 1.0}}};
    CHECK_THROWS_AS(run_detuning_heatmap(cfg, mismatch), ConfigError);

    // (delta, lambda) at the ideal point reproduces the resonant value
    SweepSpec ideal;
    ideal.axes = {{"delta", {0.0}}, {"lambda", {0.0}}};
    ideal.reduction = Reduction::AtNominalTransferTime;
    const SweepResult cell = run_detuning_heatmap(cfg, ideal);
    CHECK(std::abs(cell.grid[0] - base.fidelity[500]) < 1e-12);
}

TEST_CASE("dispersive comparison: peaks, times, degenerate couplings")
{
    const model::SystemConfig cfg = fig5_config();
    const DispersiveComparison cmp = run_dispersive_compare(cfg, {}, 6001);
    CHECK(cmp.lambda_eff == doctest::Approx(0.1).epsilon(1e-12));
    CHECK_FALSE(cmp.regime_warning);

    const int peak_eff = argmax(cmp.effective.fidelity);
    const int peak_full = argmax(cmp.full.fidelity);
    const double t_star = 0.5 * kPi / 0.1;
    CHECK(std::abs(cmp.effective.times[peak_eff] - t_star) < 0.01 * t_star);
    CHECK(cmp.effective.fidelity[peak_eff] >= 0.999999);
    CHECK(cmp.full.fidelity[peak_full] >= 0.9);
    CHECK(std::abs(cmp.full.fidelity[peak_full] - cmp.effective.fidelity[peak_eff]) < 0.05);
    CHECK(std::abs(cmp.full.times[peak_full] - cmp.effective.times[peak_eff])
          < 0.05 * t_star);

    // g = 0: nothing reaches the ensemble, both curves sit at F(0)
    model::SystemConfig frozen = cfg;
    frozen.nve.g = 0.0;
    const DispersiveComparison flat = run_dispersive_compare(frozen, {}, 501);
    for (double f : flat.full.fidelity) {
        CHECK(std::abs(f - flat.full.fidelity[0]) < 1e-9);
    }
    for (double f : flat.effective.fidelity) {
        CHECK(std::abs(f - flat.effective.fidelity[0]) < 1e-9);
    }

    model::SystemConfig resonant = fig2_config();
    CHECK_THROWS_AS(run_dispersive_compare(resonant), ConfigError);
}

TEST_CASE("dispersive heatmap: symmetric ridge and ideal-coupling column")
{
    const model::SystemConfig cfg = fig5_config();

    SweepSpec spec;
    spec.axes = {{"delta_c", {5.0, 10.0, 15.0}}, {"delta_nv", {5.0, 10.0, 15.0}}};
    spec.reduction = Reduction::MaxOverTime;
    const SweepResult grid = run_dispersive_heatmap(cfg, spec);
    const double diag = grid.grid[1 * 3 + 1];
    CHECK(diag > grid.grid[0 * 3 + 2] + 0.3);  // (5,15)
    CHECK(diag > grid.grid[2 * 3 + 0] + 0.3);  // (15,5)
    CHECK(diag >= 0.9);

    SweepSpec mism;
    mism.axes = {{"delta", {10.0}}, {"lambda", {-0.2, 0.0, 0.2}}};
    mism.reduction = Reduction::MaxOverTime;
    const SweepResult row = run_dispersive_heatmap(cfg, mism);
    CHECK(row.grid[1] > row.grid[0]);
    CHECK(row.grid[1] > row.grid[2]);

    SweepSpec degenerate;
    degenerate.axes = {{"delta", {0.0}}, {"lambda", {0.0}}};
    CHECK_THROWS_AS(run_dispersive_heatmap(cfg, degenerate), ConfigError);
}

TEST_CASE("separation study: distance monotonicity and architecture gap")
{
    const model::SystemConfig cfg = fig7_config();
    const std::vector<double> distances{2e-6, 8e-6, 20e-6, 1e-2};
    const SeparationStudy study = run_separation_study(
        cfg, distances, kPi / 4.0, ProtocolMode::Resonant, 0.0, {}, 8e-6);

    REQUIRE(study.fidelity_proposed.size() == 4);
    CHECK(study.fidelity_proposed[0] < study.fidelity_proposed[1]);
    CHECK(study.fidelity_proposed[1] < study.fidelity_proposed[2]);
    CHECK(study.fidelity_proposed[2] < study.fidelity_proposed[3]);
    // beyond 8 um the split architecture wins
    CHECK(study.fidelity_proposed[1] > study.fidelity_single[1]);
    CHECK(study.fidelity_proposed[2] > study.fidelity_single[2]);
    // 10 mm separation: leakage gone, ideal storage recovered
    CHECK(std::abs(study.fidelity_proposed[3] - 1.0) < 1e-3);

    // timeline spans rotation + transfer and ends past the swap
    CHECK(study.proposed_series.times.front() == 0.0);
    CHECK(study.proposed_series.times.back()
          > 2.0 * analytic::resonant_transfer_time(cfg.nve.g));
    REQUIRE(!study.single_series.fidelity.empty());

    model::SystemConfig no_drive = cfg;
    no_drive.drive.reset();
    CHECK_THROWS_AS(run_separation_study(no_drive, distances, kPi / 4.0,
                                         ProtocolMode::Resonant, 0.0),
                    ConfigError);

    model::SystemConfig dead = cfg;
    dead.drive->rabi_c_override = 0.0;
    CHECK_THROWS_AS(run_separation_study(dead, distances, kPi / 4.0,
                                         ProtocolMode::Resonant, 0.0),
                    ConfigError);
}

TEST_CASE("separation study in the dispersive mode")
{
    const model::SystemConfig cfg = fig7_config();
    const double delta = 10.0 * cfg.nve.g;
    const SeparationStudy study = run_separation_study(
        cfg, {8e-6, 1e-2}, kPi / 4.0, ProtocolMode::Dispersive, delta, {}, 8e-6);
    CHECK(study.fidelity_proposed[0] < study.fidelity_proposed[1]);
    CHECK(std::abs(study.fidelity_proposed[1] - 1.0) < 1e-2);
    CHECK_THROWS_AS(run_separation_study(cfg, {8e-6}, kPi / 4.0,
                                         ProtocolMode::Dispersive, 0.0),
                    ConfigError);
}

TEST_CASE("decoherence study: unitary limit and damped peaks")
{
    // gamma-scaled stand-in for the SI parameters: identical physics, fast
    model::SystemConfig cfg = fig2_config();
    const double delta = 10.0;
    const std::vector<double> gammas{0.0, 0.01, 0.05};
    const DecoherenceStudy study = run_decoherence_study(cfg, gammas, delta);
    REQUIRE(study.resonant.size() == 3);
    REQUIRE(study.dispersive.size() == 3);

    // Gamma = 0 reproduces the unitary fidelity curve
    const dynamics::Trajectory& res0 = study.resonant[0];
    const ComplexMatrix h = model::build_h_resonant(1.0, 1.0, 2);
    dynamics::TimeGrid grid{0.0, res0.times.back(), static_cast<int>(res0.size()), 1.0};
    dynamics::Trajectory pure = dynamics::evolve_pure(h, initial_state_full(cfg), grid);
    annotate_full(pure, 2, target_state(cfg.alpha, cfg.beta,
                                        TargetConvention::PhaseCorrected,
                                        TransferKind::Resonant, 2));
    for (std::size_t k = 0; k < res0.size(); ++k) {
        CHECK(std::abs(res0.fidelity[k] - pure.fidelity[k]) < 1e-8);
    }

    auto peak = [](const dynamics::Trajectory& t) {
        return *std::max_element(t.fidelity.begin(), t.fidelity.end());
    };
    CHECK(peak(study.resonant[0]) > peak(study.resonant[1]));
    CHECK(peak(study.resonant[1]) > peak(study.resonant[2]));
    CHECK(peak(study.dispersive[0]) > peak(study.dispersive[1]));
    CHECK(peak(study.dispersive[1]) > peak(study.dispersive[2]));

    for (const auto& traj : study.resonant) {
        for (double trace : traj.norm_or_trace) {
            CHECK(std::abs(trace - 1.0) < 1e-9);
        }
    }

    CHECK_THROWS_AS(run_decoherence_study(cfg, {}, delta), ConfigError);
    CHECK_THROWS_AS(run_decoherence_study(cfg, {-1.0}, delta), ConfigError);
    CHECK_THROWS_AS(run_decoherence_study(cfg, {0.0}, 0.0), ConfigError);
}

TEST_CASE("generic sweep: consistency, shape, determinism, errors")
{
    const model::SystemConfig cfg = fig2_config();

    SweepSpec one;
    one.scenario = "resonant";
    one.reduction = Reduction::AtNominalTransferTime;
    one.axes = {{"nve.g", {1.0}}};
    const SweepResult single = sweep(cfg, one);
    const dynamics::Trajectory base = run_resonant_storage(cfg, {}, 2001);
    CHECK(std::abs(single.grid[0] - base.fidelity[500]) < 1e-12);

    SweepSpec two;
    two.scenario = "resonant";
    two.reduction = Reduction::MaxOverTime;
    two.axes = {{"nve.g", {0.8, 1.0, 1.2}}, {"coupling.j_t", {0.9, 1.1}}};
    const SweepResult grid = sweep(cfg, two);
    CHECK(grid.rows() == 3);
    CHECK(grid.cols() == 2);
    REQUIRE(grid.grid.size() == 6);

    RunOptions parallel;
    parallel.workers = 4;
    const SweepResult grid4 = sweep(cfg, two, parallel);
    REQUIRE(grid4.grid.size() == grid.grid.size());
    CHECK(std::memcmp(grid.grid.data(), grid4.grid.data(),
                      grid.grid.size() * sizeof(double)) == 0);

    SweepSpec bad;
    bad.scenario = "resonant";
    bad.axes = {{"nve.gg", {1.0}}};
    CHECK_THROWS_AS(sweep(cfg, bad), ConfigError);

    SweepSpec empty;
    empty.scenario = "resonant";
    empty.axes = {{"nve.g", {}}};
    CHECK_THROWS_AS(sweep(cfg, empty), ConfigError);

    SweepSpec unknown;
    unknown.scenario = "nonsense";
    unknown.axes = {{"nve.g", {1.0}}};
    CHECK_THROWS_AS(sweep(cfg, unknown), ConfigError);
}
