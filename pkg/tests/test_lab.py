import numpy as np
import pytest

from almostorth.bounds import full_report
from almostorth.fileio import family_from_dict
from almostorth.lab import (
    KINDS,
    SuiteConfig,
    epsilon_uniform_check,
    gap_experiment,
    make_rng,
    orthogonal_family,
    random_family,
    run_suite,
    scalar_family,
    summarize,
    tail_cauchy_check,
)
from almostorth.linalg import DomainError, is_psd, op_norm
from conftest import cgauss, random_psd
from oracles import scalar_family_closed_form


class TestScalarFamily:
    def test_single(self):
        f = scalar_family(1, 3)
        assert f.n == 1
        np.testing.assert_array_equal(f[0], np.eye(3))

    def test_pair(self):
        f = scalar_family(2, 1)
        assert [complex(t[0, 0]) for t in f] == [1, 0.5]
        assert op_norm(f.total()) == 1.5

    def test_n100_ratio(self):
        _, imp, cs = scalar_family_closed_form(100)
        row = gap_experiment([100])[0]
        assert row.ratio_cs_over_improved == pytest.approx(cs / imp, rel=1e-12)
        assert row.ratio_cs_over_improved == pytest.approx(30.0, abs=0.01)


class TestOrthogonalFamily:
    def test_unit_norms(self):
        assert op_norm(orthogonal_family(3, 2, [1, 1, 1]).total()) == pytest.approx(1.0)

    def test_equality_case(self):
        rep = full_report(orthogonal_family(3, 1, [3, 1, 2]))
        assert rep.lhs_norm == pytest.approx(3.0)
        assert rep.cotlar_stein == pytest.approx(9.0) == rep.lhs_sq

    def test_exact_orthogonality(self, rng):
        norms = rng.uniform(0, 3, size=4)
        f = orthogonal_family(4, 3, norms, rng)
        for j in range(4):
            for k in range(4):
                if j != k:
                    np.testing.assert_array_equal(f[j].conj().T @ f[k], 0)
                    np.testing.assert_array_equal(f[j] @ f[k].conj().T, 0)
        rep = full_report(f)
        for m in (rep.a_matrix, rep.b_matrix):
            np.testing.assert_array_equal(m - np.diag(np.diag(m)), 0)
            np.testing.assert_allclose(np.diag(m), norms, rtol=1e-12)

    def test_negative_norm(self):
        with pytest.raises(DomainError):
            orthogonal_family(2, 1, [1.0, -1.0])

    def test_norms_length(self):
        with pytest.raises(ValueError):
            orthogonal_family(3, 1, [1.0, 2.0])


class TestRandomFamily:
    @pytest.mark.parametrize("kind", ["general", "psd", "near_orthogonal"])
    def test_deterministic(self, kind):
        a, b = random_family(4, 3, 99, kind), random_family(4, 3, 99, kind)
        for x, y in zip(a, b):
            assert x.tobytes() == y.tobytes()
        c = random_family(4, 3, 100, kind)
        assert any(x.tobytes() != y.tobytes() for x, y in zip(a, c))

    def test_psd_members(self):
        assert all(is_psd(t) for t in random_family(6, 5, 3, "psd"))

    def test_near_orthogonal_eps_zero_is_orthogonal_family(self):
        seed, n, d = 11, 4, 2
        f = random_family(n, d, seed, "near_orthogonal", eps=0.0)
        rng = make_rng(seed)
        norms = rng.uniform(0.5, 2.0, size=n)
        g = orthogonal_family(n, d, norms, rng)
        for x, y in zip(f, g):
            np.testing.assert_array_equal(x, y)

    def test_near_orthogonal_small_cross_terms(self):
        f = random_family(5, 3, 4, "near_orthogonal")
        a = full_report(f).a_matrix
        d = np.diag(a)
        # ||T_j T_k^*|| <= ~4 eps ||T_j|| ||T_k|| since the noise has norm about 2
        rel = (a**2 - np.diag(d**2)) / np.outer(d, d)
        assert rel.max() <= 6 * 0.05

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            random_family(2, 2, 0, "banana")

    @pytest.mark.parametrize("kind", ["general", "psd", "near_orthogonal"])
    def test_unimodular_invariance(self, kind, rng):
        f = random_family(5, 3, 8, kind)
        phases = np.exp(2j * np.pi * rng.random(f.n))
        r1, r2 = full_report(f), full_report(f.scaled(phases))
        np.testing.assert_allclose(r2.a_matrix, r1.a_matrix, atol=1e-10)
        np.testing.assert_allclose(r2.b_matrix, r1.b_matrix, atol=1e-10)


class TestRunSuite:
    def test_single_half_power_trial(self):
        res = run_suite("half_power", 1, SuiteConfig(seed=5))
        assert len(res) == 1
        assert res[0].check_name == "half_power" and res[0].passed
        assert res[0].seed == 5 and res[0].trial == 0

    @pytest.mark.parametrize("kind", KINDS)
    def test_all_suites_pass(self, kind):
        res = run_suite("all", 25, SuiteConfig(kind=kind, seed=3, dims=(1, 4), counts=(1, 6)))
        failed = [r for r in res if not r.passed]
        assert not failed, failed[:3]

    def test_orthogonal_tightness_checks_present(self):
        res = run_suite("chain", 10, SuiteConfig(kind="orthogonal"))
        tight = [r for r in res if r.check_name == "tight_orthogonal"]
        assert len(tight) == 10 and all(r.passed for r in tight)

    def test_deterministic(self):
        cfg = SuiteConfig(seed=42, dims=(1, 5), counts=(1, 5))
        a, b = run_suite("all", 8, cfg), run_suite("all", 8, cfg)
        assert [(r.check_name, r.trial, r.lhs, r.rhs, r.passed) for r in a] == [
            (r.check_name, r.trial, r.lhs, r.rhs, r.passed) for r in b
        ]

    def test_ordered_by_trial_then_name(self):
        res = run_suite("all", 3, SuiteConfig())
        keys = [(r.trial, r.check_name) for r in res]
        assert keys == sorted(keys)

    def test_trial_stream_independent_of_count(self):
        short = run_suite("improved", 3, SuiteConfig(seed=9))
        long = run_suite("improved", 6, SuiteConfig(seed=9))
        assert [(r.lhs, r.rhs) for r in short] == [(r.lhs, r.rhs) for r in long[:3]]

    def test_forced_failure_carries_replayable_witness(self):
        cfg = SuiteConfig(seed=1, kind="general", overrides={"norm_identity": 1e-30})
        res = run_suite("norm_identity", 20, cfg)
        failed = [r for r in res if not r.passed]
        assert failed
        r = failed[0]
        assert r.witness is not None and abs(r.lhs - r.rhs) > r.slack_used
        fam = family_from_dict(r.witness)
        assert fam.label.startswith("norm_identity")
        assert "vectors" in r.witness

    def test_passed_field_matches_relation(self):
        for r in run_suite("all", 5, SuiteConfig(seed=2)):
            if r.relation == "le":
                assert r.passed == (r.lhs <= r.rhs + r.slack_used)
            else:
                assert r.passed == (abs(r.lhs - r.rhs) <= r.slack_used)

    @pytest.mark.parametrize("bad", [dict(suite="nope"), dict(trials=0)])
    def test_bad_arguments(self, bad):
        kw = dict(suite="all", trials=1) | bad
        with pytest.raises(ValueError):
            run_suite(kw["suite"], kw["trials"])

    def test_summarize(self):
        s = summarize(run_suite("abs_value", 4, SuiteConfig()))
        assert s == {"P_positive": (4, 4), "absolute_value": (4, 4)}


class TestGapExperiment:
    def test_n1(self):
        assert gap_experiment([1])[0].ratio_cs_over_improved == pytest.approx(1.0)

    def test_n4(self):
        row = gap_experiment([4])[0]
        assert row.cotlar_stein == pytest.approx(6.25, abs=1e-12)
        assert row.improved == pytest.approx(3.0625, abs=1e-12)
        assert row.ratio_cs_over_improved == pytest.approx(6.25 / 3.0625, rel=1e-12)
        assert row.ratio_cs_over_improved == pytest.approx(2.0408, abs=1e-4)

    def test_doubling_growth(self):
        rows = gap_experiment([8, 16, 32, 64, 128, 256])
        ratios = [r.ratio_cs_over_improved for r in rows]
        for n, prev, cur in zip([16, 32, 64, 128, 256], ratios, ratios[1:]):
            assert cur > prev
            if n >= 32:
                assert 1.6 <= cur / prev <= 2.4

    def test_monotone_and_linear_growth(self):
        rows = gap_experiment(range(2, 130))
        ratios = [r.ratio_cs_over_improved for r in rows]
        assert all(b >= a for a, b in zip(ratios, ratios[1:]))
        assert all(r.ratio_cs_over_improved > r.n / 5 for r in rows if r.n >= 100)

    def test_custom_family(self):
        rows = gap_experiment([3], family="custom", custom=lambda n: orthogonal_family(n, 1, [1.0] * n))
        assert rows[0].ratio_cs_over_improved == pytest.approx(1.0)

    def test_bad_n(self):
        with pytest.raises(ValueError):
            gap_experiment([0])


class TestTailCauchy:
    def test_single_psd_eigenvector_equality(self, rng):
        a = random_psd(rng, 3)
        w, q = np.linalg.eigh(a)
        row = tail_cauchy_check([a], q[:, -1], 1, 1)
        assert row.tail_norm_sq == pytest.approx(row.cauchy_bound, rel=1e-9)

    def test_zero_vector(self, rng):
        row = tail_cauchy_check([cgauss(rng, 2, 2) for _ in range(3)], np.zeros(2), 1, 3)
        assert row.tail_norm_sq == 0.0 and row.cauchy_bound == 0.0

    def test_random_windows(self, rng):
        f = random_family(10, 4, 17, "general")
        for _ in range(30):
            m = int(rng.integers(1, 11))
            n = int(rng.integers(m, 11))
            row = tail_cauchy_check(f, cgauss(rng, 4), m, n)
            assert row.holds()

    def test_monotone_for_scalar_family(self):
        f = scalar_family(50, 1)
        tails = [tail_cauchy_check(f, [1.0], m, 50).tail_norm_sq for m in range(1, 51)]
        assert all(b <= a for a, b in zip(tails, tails[1:]))

    @pytest.mark.parametrize("m,n", [(0, 1), (2, 1), (1, 4)])
    def test_window_out_of_range(self, m, n):
        with pytest.raises(IndexError):
            tail_cauchy_check(scalar_family(3), [1.0], m, n)


class TestEpsilonUniform:
    def test_single_trial_is_plain_sum(self, rng):
        f = random_family(4, 3, 21)
        r = epsilon_uniform_check(f, 1, seed=0)
        assert r.lhs == pytest.approx(op_norm(f.total()))
        assert r.passed

    def test_sign_flip(self, rng):
        t = cgauss(rng, 3, 3)
        assert op_norm(-t) == op_norm(t)
        assert epsilon_uniform_check([t], 5, seed=1).passed

    @pytest.mark.parametrize("kind", ["general", "psd", "near_orthogonal"])
    def test_random(self, kind):
        r = epsilon_uniform_check(random_family(6, 3, 5, kind), 50, seed=2)
        assert r.passed and r.seed == 2
