import logging
import math

import numpy as np
import pytest

import oracles
from betamix import generators as gen
from betamix.ground import GroundSpace
from betamix.mixing import (
    MixingReport,
    admissible_pairs,
    alpha_exact,
    beta_exact,
    beta_pq_r_sweep,
    beta_sup_form_check,
    determinant_gap,
    dpp_bound_display,
    dpp_bound_general,
    dpp_bound_rank,
    dpp_lower_bound,
    mixing_report,
    sign_maximizer,
    theorem1_bound,
)
from betamix.process import DiscreteDPP, FiniteProcess, correlations_of, dpp_to_process
from betamix.transforms import BiSetFunction

TOL = 1e-10


def law_dict(process):
    return dict(process.items())


class TestBeta:
    def test_independent_sites(self):
        process = FiniteProcess.independent(GroundSpace.line(4), [0.2, 0.5, 0.6, 0.9])
        assert beta_exact(process, (0, 1), (2, 3)) == pytest.approx(0.0, abs=1e-15)
        assert alpha_exact(process, (0, 1), (2, 3)) == pytest.approx(0.0, abs=1e-15)

    def test_two_site_dpp(self, two_site):
        process = dpp_to_process(two_site)
        assert beta_exact(process, (0,), (1,)) == pytest.approx(0.18, abs=1e-12)
        assert alpha_exact(process, (0,), (1,)) == pytest.approx(0.09, abs=1e-12)

    def test_empty_region(self, rng):
        process = gen.random_law(rng, GroundSpace.line(3))
        assert beta_exact(process, (), (0, 1)) == pytest.approx(0.0, abs=1e-15)

    def test_against_brute_force(self, rng):
        space = GroundSpace.line(6)
        for _ in range(5):
            process = gen.random_law(rng, space)
            a, b = gen.random_disjoint(rng, space)
            assert beta_exact(process, a, b) == pytest.approx(oracles.beta(law_dict(process), a, b), abs=1e-12)

    def test_alpha_against_brute_force(self, rng):
        space = GroundSpace.line(5)
        process = gen.random_law(rng, space)
        assert alpha_exact(process, (0, 4), (2,)) == pytest.approx(
            oracles.alpha(law_dict(process), (0, 4), (2,)), abs=1e-12
        )

    def test_alpha_cap(self, rng):
        process = gen.random_law(rng, GroundSpace.line(6))
        with pytest.raises(ValueError, match="cap"):
            alpha_exact(process, (0, 1, 2, 3), (4,))

    def test_overlap_rejected(self, rng):
        process = gen.random_law(rng, GroundSpace.line(3))
        with pytest.raises(ValueError):
            beta_exact(process, (0, 1), (1,))

    def test_symmetry(self, rng):
        process = gen.random_law(rng, GroundSpace.line(6))
        assert beta_exact(process, (0, 2), (3, 5)) == pytest.approx(beta_exact(process, (3, 5), (0, 2)), abs=1e-14)
        oracle = correlations_of(process)
        assert theorem1_bound(oracle, (0, 2), (3, 5)) == pytest.approx(theorem1_bound(oracle, (3, 5), (0, 2)), abs=1e-12)

    def test_two_alpha_below_beta(self, rng):
        for _ in range(30):
            space = GroundSpace.line(int(rng.integers(2, 7)))
            process = gen.random_law(rng, space, sparsity=0.3)
            a, b = gen.random_disjoint(rng, space, 3, 3)
            assert 2 * alpha_exact(process, a, b) <= beta_exact(process, a, b) + TOL
            assert alpha_exact(process, a, b) <= 0.25 + TOL


class TestSupForm:
    def test_constant(self, rng):
        process = gen.random_law(rng, GroundSpace.line(4))
        f = BiSetFunction.constant((0,), (2, 3), 1.0)
        assert beta_sup_form_check(process, (0,), (2, 3), f) == pytest.approx(0.0, abs=1e-15)

    def test_sign_maximizer_attains_beta(self, rng):
        process = gen.random_law(rng, GroundSpace.line(5))
        f = sign_maximizer(process, (0, 1), (3, 4))
        assert beta_sup_form_check(process, (0, 1), (3, 4), f) == pytest.approx(
            beta_exact(process, (0, 1), (3, 4)), abs=1e-14
        )

    def test_random_test_functions(self, rng):
        process = gen.random_law(rng, GroundSpace.line(5))
        beta = beta_exact(process, (0, 2), (1, 4))
        for _ in range(1000):
            f = BiSetFunction((0, 2), (1, 4), rng.uniform(-1, 1, (4, 4)))
            assert beta_sup_form_check(process, (0, 2), (1, 4), f) <= beta + TOL

    def test_norm_checked(self, rng):
        process = gen.random_law(rng, GroundSpace.line(2))
        with pytest.raises(ValueError):
            beta_sup_form_check(process, (0,), (1,), BiSetFunction.constant((0,), (1,), 1.5))


class TestTheorem1:
    def test_product_correlations(self):
        process = FiniteProcess.independent(GroundSpace.line(4), [0.3, 0.3, 0.5, 0.8])
        assert theorem1_bound(correlations_of(process), (0, 1), (2, 3)) == pytest.approx(0.0, abs=1e-14)

    def test_two_site(self, two_site):
        assert theorem1_bound(two_site.correlations(), (0,), (1,)) == pytest.approx(0.36, abs=1e-12)
        assert theorem1_bound(two_site.correlations(), (), (1,)) == 0.0

    def test_against_brute_force(self, rng):
        space = GroundSpace.from_coords(rng.normal(size=(6, 1)), weights=rng.uniform(0.3, 2, 6))
        process = gen.random_law(rng, space)
        got = theorem1_bound(correlations_of(process), (0, 1, 2), (4, 5))
        assert got == pytest.approx(oracles.theorem1(law_dict(process), space.weights, (0, 1, 2), (4, 5)), rel=1e-12)

    def test_dominates_beta(self, rng):
        for _ in range(200):
            space = gen.random_space(rng, int(rng.integers(2, 8)), unit_weights=bool(rng.random() < 0.5))
            if rng.random() < 0.5:
                dpp = gen.random_dpp(rng, space)
                process, oracle = dpp_to_process(dpp), dpp.correlations()
            else:
                process = gen.random_law(rng, space, sparsity=0.4)
                oracle = correlations_of(process)
            a, b = gen.random_disjoint(rng, space, 3, 3)
            assert beta_exact(process, a, b) <= theorem1_bound(oracle, a, b) + TOL


class TestDppBounds:
    def test_zero_cross_block(self):
        k = np.array([[0.5, 0.1, 0.0], [0.1, 0.5, 0.0], [0.0, 0.0, 0.3]])
        dpp = DiscreteDPP(GroundSpace.line(3), k)
        assert dpp_bound_general(dpp, (0, 1), (2,)) == 0.0
        assert dpp_lower_bound(dpp, (0, 1), (2,)) == 0.0

    def test_two_site_general(self, two_site):
        # sum_n n^2 x^n / n! = x (1 + x) e^x, so with p = q = 1, |K| = 0.5 the constant is 16 e^2
        x = 2 * 0.5
        series = sum(n * n * x**n / math.factorial(n) for n in range(60))
        assert series == pytest.approx(x * (1 + x) * math.exp(x))
        constant = 4 * series**2 / x**2
        assert dpp_bound_general(two_site, (0,), (1,)) == pytest.approx(constant * 0.09, abs=1e-9)
        assert dpp_bound_general(two_site, (0,), (1,)) == pytest.approx(16 * math.e**2 * 0.09, abs=1e-9)
        assert dpp_bound_display(two_site, (0,), (1,)) == pytest.approx(16 * math.e**2 * 0.09, abs=1e-9)

    def test_rank_one(self, rank_one):
        assert rank_one.rank() == 1
        assert dpp_bound_rank(rank_one, (0,), (1,)) == pytest.approx(5.76, abs=1e-9)

    def test_zero_kernel(self):
        dpp = DiscreteDPP(GroundSpace.line(3), np.zeros((3, 3)))
        assert dpp_bound_rank(dpp, (0,), (1, 2)) == 0.0
        assert dpp_lower_bound(dpp, (0,), (1, 2)) == 0.0

    def test_general_dominates_theorem1(self, rng):
        for _ in range(300):
            space = gen.random_space(rng, int(rng.integers(2, 8)), unit_weights=bool(rng.random() < 0.5))
            dpp = gen.random_dpp(rng, space)
            a, b = gen.random_disjoint(rng, space, 3, 3)
            assert theorem1_bound(dpp.correlations(), a, b) <= dpp_bound_general(dpp, a, b) + TOL
            assert dpp_bound_general(dpp, a, b) <= dpp_bound_display(dpp, a, b) + TOL

    def test_rank_bound_dominates_beta(self, rng):
        for _ in range(300):
            n = int(rng.integers(2, 8))
            space = gen.random_space(rng, n, unit_weights=bool(rng.random() < 0.5))
            dpp = gen.random_dpp(rng, space, rank=int(rng.integers(1, 3)))
            a, b = gen.random_disjoint(rng, space, 3, 3)
            assert beta_exact(dpp_to_process(dpp), a, b) <= dpp_bound_rank(dpp, a, b) + TOL

    def test_lower_bound_two_site(self, two_site):
        value = dpp_lower_bound(two_site, (0,), (1,))
        assert value == pytest.approx(2 * 0.2**1.25 * 0.09, abs=1e-12)
        assert value == pytest.approx(0.0241, abs=5e-5)
        assert value <= beta_exact(dpp_to_process(two_site), (0,), (1,))

    def test_lower_bound_hypotheses(self, rng):
        with pytest.raises(ValueError, match="hypotheses"):
            dpp_lower_bound(DiscreteDPP(GroundSpace.line(2), np.eye(2)), (0,), (1,))
        negative = DiscreteDPP(GroundSpace.line(2), [[0.5, -0.3], [-0.3, 0.5]])
        with pytest.raises(ValueError, match="hypotheses"):
            dpp_lower_bound(negative, (0,), (1,))

    def test_small_kernel_ratio(self):
        # the lower/upper ratio tends to 1/2 as the kernel shrinks
        base = np.array([[0.5, 0.3], [0.3, 0.5]])
        ratios = []
        for t in (0.1, 0.05, 0.01):
            dpp = DiscreteDPP(GroundSpace.line(2), t * base)
            ratios.append(dpp_lower_bound(dpp, (0,), (1,)) / dpp_bound_general(dpp, (0,), (1,)))
        gaps = [abs(r - 0.5) for r in ratios]
        assert gaps[0] > gaps[1] > gaps[2]
        # the approach is first order in t
        assert gaps[2] / gaps[0] < 0.2


class TestDeterminantGap:
    def test_block_diagonal(self):
        k = np.zeros((4, 4))
        k[:2, :2] = [[0.5, 0.2], [0.2, 0.4]]
        k[2:, 2:] = [[0.3, 0.1], [0.1, 0.6]]
        gap, _, _ = determinant_gap(k, [0, 1], [2, 3])
        assert gap == pytest.approx(0.0, abs=1e-15)

    def test_single_points(self, rng):
        k = oracles.random_psd(rng, 3)
        gap, b1, b2 = determinant_gap(k, [0], [2])
        assert gap == pytest.approx(k[0, 2] ** 2, abs=1e-15)
        assert b1 == pytest.approx(k[0, 2] ** 2, abs=1e-15)
        assert b2 == pytest.approx(k[0, 2] ** 2, abs=1e-15)

    def test_random_kernels(self, rng):
        for _ in range(1000):
            size = int(rng.integers(2, 9))
            k = oracles.random_psd(rng, size, top=rng.uniform(0.05, 1.0))
            perm = rng.permutation(size)
            n = int(rng.integers(1, min(4, size - 1) + 1))
            m = int(rng.integers(1, min(4, size - n) + 1))
            gap, b1, b2 = determinant_gap(k, list(perm[:n]), list(perm[n : n + m]))
            assert gap <= b1 + TOL
            assert gap <= b2 + TOL

    def test_rejects_shared_index(self):
        with pytest.raises(ValueError):
            determinant_gap(np.eye(3), [0, 1], [1])


class TestSweep:
    def test_large_r(self, rng):
        space = GroundSpace.line(5)
        report = beta_pq_r_sweep(gen.random_dpp(rng, space), 2, 2, space.diameter() + 1)
        assert report.B == ()
        assert report.beta_exact == 0.0

    def test_zero_measure(self, rng):
        report = beta_pq_r_sweep(gen.random_law(rng, GroundSpace.line(4)), 0, 0, 0)
        assert report.A == () and report.B == ()
        assert report.beta_exact == 0.0

    def test_monotone_in_r(self):
        space = GroundSpace.line(6)
        dpp = gen.gaussian_dpp(space, length=1.5, top=0.9)
        values = [beta_pq_r_sweep(dpp, 1, 1, r).beta_exact for r in (0.5, 1.5, 2.5, 3.5, 4.5, 5.5)]
        assert all(b <= a + 1e-15 for a, b in zip(values, values[1:]))
        assert values[0] > 0 and values[-1] == 0

    def test_maximizer_is_exhaustive(self, rng):
        space = gen.random_space(rng, 5)
        process = gen.random_law(rng, space)
        report = beta_pq_r_sweep(process, 2, 2, 0.5)
        best = max(beta_exact(process, a, b) for a, b in admissible_pairs(space, 2, 2, 0.5))
        assert report.beta_exact == best

    def test_tie_break(self):
        # a product process makes every pair tie at zero
        process = FiniteProcess.independent(GroundSpace.line(3), [0.5, 0.5, 0.5])
        report = beta_pq_r_sweep(process, 1, 1, 0)
        assert (report.A, report.B) == ((), ())

    def test_pair_cap(self):
        with pytest.raises(ValueError, match="cap"):
            admissible_pairs(GroundSpace.line(6), 6, 6, -1, max_pairs=100)

    def test_sandwich_on_maximizers(self, rng, caplog):
        for _ in range(10):
            space = gen.random_space(rng, 6, d=2)
            dpp = gen.gaussian_dpp(space, length=1.0, top=0.8)
            report = beta_pq_r_sweep(dpp, 2, 2, 0.5)
            assert report.lower_bound_dpp <= report.beta_exact + TOL
            assert report.beta_exact <= report.bound_dpp_general + TOL
            assert report.beta_exact <= report.bound_theorem1 + TOL


class TestReport:
    def test_fields(self, two_site):
        report = mixing_report(two_site, (0,), (1,))
        assert report.beta_exact == pytest.approx(0.18)
        assert report.bound_theorem1 == pytest.approx(0.36)
        assert report.bound_dpp_rank is None
        assert report.r == 1.0

    def test_csv(self, rank_one):
        text = mixing_report(rank_one, (0,), (1,)).to_csv().splitlines()
        assert text[0] == "A,B,p,q,r,beta_exact,alpha_exact,bound_theorem1,bound_dpp_general,bound_dpp_rank,lower_bound_dpp"
        assert text[1].split(",")[9] == repr(dpp_bound_rank(rank_one, (0,), (1,)))

    def test_absent_optionals(self, rng):
        report = mixing_report(gen.random_law(rng, GroundSpace.line(3)), (0,), (1, 2))
        row = report.csv_row()
        assert row[-3:] == ["", "", ""]
        assert report.to_dict()["bound_dpp_general"] is None

    def test_infinite_distance_serializes(self, rng):
        report = mixing_report(gen.random_law(rng, GroundSpace.line(3)), (0,), ())
        assert report.to_dict()["r"] == "inf"
