from fractions import Fraction

import numpy as np
import pytest

from epistate import experiments as ex
from epistate.contextprob import joint_measure_feasible
from epistate.linalg import ContractViolation
from epistate.rng import BLOCK_SHOTS

from oracles import ess_optical_rates, qm_optical_rates, rho_oracle


def within(x, n, p, k=5.0):
    return abs(x / n - p) <= k * np.sqrt(p * (1 - p) / n) + 1e-12


# --- double slit ------------------------------------------------------------------


def test_double_slit_model_validation():
    with pytest.raises(ContractViolation):
        ex.DoubleSlitModel(slit_a=())
    with pytest.raises(ContractViolation):
        ex.DoubleSlitModel(slit_a=(1, 2), slit_b=(2, 3))
    with pytest.raises(ContractViolation):
        ex.DoubleSlitModel(n_sites=8, slit_a=(1,), slit_b=(2,), momentum_bins=((0, 1), (2,)))


def test_three_terms_sum_to_distribution():
    spectrum = ex.double_slit_spectrum(ex.DoubleSlitModel())
    assert abs(spectrum.total.sum() - 1) < 1e-10
    assert abs(spectrum.classical.sum() - 1) < 1e-10
    assert np.max(np.abs(spectrum.total - spectrum.interference - spectrum.classical)) < 1e-10


def test_interference_fringes_and_symmetry():
    spectrum = ex.double_slit_spectrum(ex.DoubleSlitModel())
    assert np.max(np.abs(spectrum.interference)) > 1e-3
    assert spectrum.sign_changes() >= 3
    n = spectrum.interference.size
    mirrored = spectrum.interference[(-np.arange(n)) % n]
    assert np.allclose(spectrum.interference, mirrored, atol=1e-12)


def test_interference_vanishes_for_commuting_readout():
    m = ex.DoubleSlitModel()
    spectrum = ex.double_slit_spectrum(m, projectors=m.site_projectors())
    assert np.max(np.abs(spectrum.interference)) < 1e-12


def test_single_slit_distribution_is_classical_mixture():
    spectrum = ex.double_slit_spectrum(ex.DoubleSlitModel(), both_open=False)
    assert np.array_equal(spectrum.distribution, spectrum.classical)
    assert np.isclose(spectrum.p_pass_a, 0.5) and np.isclose(spectrum.p_pass_b, 0.5)


def test_coarse_momentum_bins():
    bins = tuple((2 * k, 2 * k + 1) for k in range(32))
    spectrum = ex.double_slit_spectrum(ex.DoubleSlitModel(momentum_bins=bins))
    assert spectrum.total.size == 32 and abs(spectrum.total.sum() - 1) < 1e-10


def test_double_slit_sampling_counts():
    spectrum = ex.double_slit_spectrum(ex.DoubleSlitModel())
    counts = ex.sample_double_slit(spectrum, 50_000, seed=1)
    assert counts.sum() == 50_000
    assert np.all(counts[spectrum.total < 1e-15] == 0)


# --- delayed choice -----------------------------------------------------------------


@pytest.mark.parametrize("engine", ex.ENGINES)
def test_delayed_choice_closed_and_open(engine):
    n = 100_000
    res = ex.run_delayed_choice([("closed", "before_entry"), ("open", "after_entry")], n, engine, seed=3)
    assert res.counts[0] == {"Da": 0, "Db": n}
    assert within(res.counts[1]["Da"], n, 0.5)


def test_delayed_choice_timing_independent_ess():
    sched = [("open", "before_entry"), ("open", "after_entry"), ("closed", "after_entry")]
    res = ex.run_delayed_choice(sched, 20_000, "ess", seed=4)
    assert res.timing_independent()
    assert np.array_equal(res.sequences[0], res.sequences[1])


def test_delayed_choice_phase_perturbation():
    d = 1.1
    n = 100_000
    res = ex.run_delayed_choice([("closed", "before_entry")], n, "qm", seed=5, delta=d)
    assert within(res.counts[0]["Db"], n, np.cos(d / 2) ** 2)
    with pytest.raises(ContractViolation):
        ex.run_delayed_choice([("closed", "before_entry")], 10, "ess", seed=5, delta=d)
    with pytest.raises(ContractViolation):
        ex.run_delayed_choice([("ajar", "before_entry")], 10, "qm", seed=5)


# --- EPR ------------------------------------------------------------------------------


@pytest.mark.parametrize("engine", ex.ENGINES)
def test_epr_same_axis_zero_violations(engine):
    axes = [(0.0, 0.0), (1.0, 1.0), (0.3, 0.3 + 2 * np.pi)]
    res = ex.run_epr_sweep(axes, 200_000, engine, seed=6)
    for i in range(len(axes)):
        assert res.violations(i) == 0
        assert res.correlation(i) == -1


@pytest.mark.parametrize("engine", ex.ENGINES)
def test_epr_z_x_uncorrelated(engine):
    n = 100_000
    res = ex.run_epr_sweep([(0.0, np.pi / 2)], n, engine, seed=7)
    assert abs(float(res.correlation(0))) < 5 / np.sqrt(n)


@pytest.mark.parametrize("engine", ex.ENGINES)
def test_epr_cos_rule(engine):
    n = 100_000
    for i, (a, b) in enumerate([(0.0, 0.7), (0.4, 2.2)]):
        res = ex.run_epr_sweep([(a, b)], n, engine, seed=8 + i)
        e = -np.cos(b - a)
        assert abs(float(res.correlation(0)) - e) < 5 * np.sqrt((1 - e * e) / n)


def test_epr_antipodal_axes_correlated():
    res = ex.run_epr_sweep([(0.2, 0.2 + np.pi)], 10_000, "ess", seed=9)
    assert res.correlation(0) == 1


def test_chsh_table_is_infeasible():
    res = ex.run_epr_sweep(ex.chsh_pairs(), 100_000, "qm", seed=10)
    assert abs(abs(ex.chsh_value(res)) - 2 * np.sqrt(2)) < 0.05
    f = joint_measure_feasible(res.table)
    assert not f.feasible and f.witness > 2
    assert all(isinstance(v, Fraction) for v in res.table.values.values())


def test_violations_requires_same_axis():
    res = ex.run_epr_sweep([(0.0, 1.0)], 10, "qm", seed=0)
    with pytest.raises(ContractViolation):
        res.violations(0)


# --- ideal teleportation ------------------------------------------------------------


def test_teleport_ideal_histogram_and_fidelity():
    n = 100_000
    res = ex.run_teleport_ideal(np.cos(0.4), np.exp(0.3j) * np.sin(0.4), n, seed=11)
    assert abs(res.mean_fidelity - 1) < 1e-10
    for k, c in res.counts.items():
        assert within(c, n, 0.25)


def test_teleport_ideal_without_correction():
    res = ex.run_teleport_ideal(1, 0, 10_000, seed=12, correct=False)
    assert res.fidelities["Psi-"] > 1 - 1e-12 and res.fidelities["Psi+"] > 1 - 1e-12
    assert res.fidelities["Phi-"] < 1e-12 and res.fidelities["Phi+"] < 1e-12


def test_teleport_ideal_rejects_unnormalized():
    with pytest.raises(ContractViolation):
        ex.run_teleport_ideal(1, 1, 10, seed=0)


# --- optical teleportation -------------------------------------------------------------


def test_apparatus_canonicalizes_angles():
    app = ex.TeleportApparatus(270, -45)
    assert app.encoder_angle == 90.0 and app.pbs_angle == 135.0
    with pytest.raises(ContractViolation):
        ex.TeleportApparatus(0, 0, engine="bohm")
    with pytest.raises(ContractViolation):
        ex.TeleportApparatus(0, 0, overlap=1.5)


def test_coincidence_classification():
    C = ex.CoincidenceRecord.from_fired
    assert C({"D0", "D1", "D2", "D-3"}).classification == "minus_coincidence"
    assert C({"D0", "D1", "D2", "D+3"}).classification == "plus_coincidence"
    assert C({"D0", "D1", "D+3"}).classification == "no_coincidence"
    assert C({"D0", "D2", "D-3"}).classification == "no_coincidence"


def test_qm_aligned_90_has_no_minus_coincidences():
    res = ex.run_optical_teleport(ex.TeleportApparatus(90, 90, True, 100_000, "qm"), seed=13)
    assert res.counts["N_minus"] == 0
    assert res.counts["N_plus"] > 0
    for rec in res.records():
        if {"D1", "D2"} <= rec.fired:
            assert "D+3" in rec.fired


def test_qm_misaligned_minus_equals_plus():
    res = ex.run_optical_teleport(ex.TeleportApparatus(90, 90, False, 100_000, "qm"), seed=14)
    nm, np_ = res.counts["N_minus"], res.counts["N_plus"]
    assert within(nm, nm + np_, 0.5)


def test_ess_aligned_90_has_no_minus_coincidences():
    res = ex.run_optical_teleport(ex.TeleportApparatus(90, 90, True, 100_000, "ess"), seed=15)
    assert res.counts["N_minus"] == 0


@pytest.mark.parametrize("engine,rates", [("qm", qm_optical_rates), ("ess", ess_optical_rates)])
@pytest.mark.parametrize("angle", [45, 90])
@pytest.mark.parametrize("overlap", [Fraction(1), Fraction(9, 10), Fraction(1, 2)])
def test_optical_rates_match_enumeration_oracle(engine, rates, angle, overlap):
    n = 200_000
    res = ex.run_optical_teleport(ex.TeleportApparatus(angle, angle, True, n, engine, float(overlap)), seed=16)
    m, p = rates(angle, overlap)
    assert within(res.counts["N_minus"], n, float(m))
    assert within(res.counts["N_plus"], n, float(p))


def test_counts_sum_to_shots():
    res = ex.run_optical_teleport(ex.TeleportApparatus(45, 45, True, 12_345, "ess", 0.9), seed=17)
    assert sum(res.counts.values()) == 12_345


def test_trace_across_block_boundary():
    app = ex.TeleportApparatus(45, 45, True, BLOCK_SHOTS + 100, "ess", 0.9)
    res = ex.run_optical_teleport(app, seed=18)
    trace = ex.trace_optical_teleport(app, 18, BLOCK_SHOTS - 50, BLOCK_SHOTS + 50)
    expect = [ex.CoincidenceRecord.from_code(c).fired for c in res.codes[BLOCK_SHOTS - 50: BLOCK_SHOTS + 50]]
    assert [r.fired for r in trace] == expect


def test_run_until_hits_target_exactly():
    app = ex.TeleportApparatus(45, 45, True, 0, "ess", 0.9)
    res = ex.run_optical_until(app, 30_000, seed=19, batch_blocks=1)
    assert res.counts["N_minus"] + res.counts["N_plus"] == 30_000
    assert res.codes.size == res.shots
    minus, plus = ex.classify_codes(res.codes[-1:])
    assert minus[0] or plus[0]  # stops on a coincidence
    other = ex.run_optical_until(app, 30_000, seed=19, batch_blocks=4, shards=3)
    assert other.shots == res.shots and np.array_equal(other.codes, res.codes)


# --- rho ------------------------------------------------------------------------------


def test_rho_oracle_values():
    eta = Fraction(9, 10)
    assert rho_oracle(lambda a: qm_optical_rates(a, eta)) == 1
    assert rho_oracle(lambda a: ess_optical_rates(a, eta)) == Fraction(11, 2)
    assert rho_oracle(lambda a: ess_optical_rates(a, Fraction(1))) is None
    # closed form 1 + eta / (2 (1 - eta))
    for eta in (Fraction(1, 2), Fraction(3, 4), Fraction(99, 100)):
        assert rho_oracle(lambda a: ess_optical_rates(a, eta)) == 1 + eta / (2 * (1 - eta))


def test_rho_small_target():
    q = ex.rho_statistic(50_000, seed=20, engine="qm")
    e = ex.rho_statistic(50_000, seed=20, engine="ess")
    assert q.ci_low <= q.rho <= q.ci_high and e.ci_low <= e.rho <= e.ci_high
    assert e.ci_low > q.ci_high
    for r in (q, e):
        for run in r.runs.values():
            assert run.counts["N_minus"] + run.counts["N_plus"] == 50_000


def test_rho_insufficient_statistics():
    r = ex.rho_statistic(1000, seed=21, engine="ess", overlap=1.0)
    assert r.status == ex.INSUFFICIENT and r.rho is None and r.ci_low is None


def test_rho_bootstrap_interval_contains_point():
    rng = np.random.default_rng(0)
    lo, hi = ex.rho_bootstrap(500, 100, 1000, rng)
    assert lo < 5 < hi


# --- determinism --------------------------------------------------------------------


def test_shard_count_invariance():
    for shards in (2, 5):
        a = ex.run_epr_sweep([(0.1, 0.9)], 3 * BLOCK_SHOTS + 17, "ess", seed=22)
        b = ex.run_epr_sweep([(0.1, 0.9)], 3 * BLOCK_SHOTS + 17, "ess", seed=22, shards=shards)
        assert np.array_equal(a.codes[0], b.codes[0])


def test_gns_demo():
    r = ex.gns_demo(samples=20)
    assert r.values == {"Psi(S1z)": 0.5, "Psi(S2z)": 0.5, "Psi(Sz)": 1.0, "Psi(S^2)": 2.0}
    assert r.rep_dim == 4 and r.reproduction_error < 1e-8
