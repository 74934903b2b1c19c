import numpy as np
import pytest

from hwsilw import stability as sb


def test_symbol_vanishes_at_zero_phase():
    Q1, _ = sb.periodic_symbol(np.array(0.0))
    assert np.abs(Q1).max() < 1e-14


def test_symbol_matches_printed_formulas_at_pi():
    # independent evaluation of the trigonometric entries at xi = pi
    xi = np.pi
    Q1, Q2 = sb.periodic_symbol(np.array(xi), dx=0.7)
    c1, s1, c2, s2 = np.cos(xi), np.sin(xi), np.cos(2 * xi), np.sin(2 * xi)
    assert Q1[0, 0] == pytest.approx((-23 / 120 * c2 + 4 / 15 * c1 - 3 / 40)
                                     + 1j * (23 / 120 * s2 - 83 / 60 * s1))
    assert Q1[0, 1] == pytest.approx(0.7 * ((-3 / 40 * c2 + c1 / 4 - 7 / 40)
                                            + 1j * (3 / 40 * s2 + s1 / 10)))
    assert Q1[1, 0] == pytest.approx((1 / 0.7) * ((3 / 8 * c2 - 4 * c1 + 29 / 8)
                                                  + 1j * (-3 / 8 * s2 + 0.75 * s1)))
    assert Q1[1, 1] == pytest.approx((c2 / 8 + c1 / 4 - 3 / 8)
                                     + 1j * (-s2 / 8 + s1 / 2))
    assert Q2[1, 0] == pytest.approx(1.5 / 0.7 * 1j * s1)
    assert Q2[1, 1] == pytest.approx(-0.5 * c1)


def test_amplification_eigenvalues_at_zero_phase():
    # at xi = 0 the operator reduces to G = Q2/3 + Q2^2/2 + Q2^3/6 with
    # Q2 eigenvalues {1, -1/2}: eigenvalues {1, -1/16}
    Q1, Q2 = sb.periodic_symbol(np.array(0.0))
    G = sb.rk3_amplification(Q1, Q2, 0.9)
    eig = sorted(np.linalg.eigvals(G).real)
    assert eig[0] == pytest.approx(-1 / 16, abs=1e-12)
    assert eig[1] == pytest.approx(1.0, abs=1e-12)


def test_spectral_radius_independent_of_dx():
    vals = [sb.periodic_max_amplification(1.05, 801, dx) for dx in (1.0, 0.1, 0.01)]
    assert np.ptp(vals) < 1e-9


def test_periodic_scan_brackets():
    assert sb.periodic_max_amplification(0.5, 2001) <= 1 + 1e-10
    assert sb.periodic_max_amplification(1.2, 2001) > 1 + 1e-6


def test_periodic_cfl_bound_value():
    lam = sb.periodic_cfl_bound(10001)
    assert 1.06 <= lam <= 1.08


def test_boundary_matrix_powers_decay_constants():
    # the operator is non-normal (a single application can grow slightly in
    # l2) but the homogeneous Dirichlet data force the powers to decay
    vec = np.concatenate([np.ones(40), np.zeros(40)])
    for ca in (0.0, 0.37, 0.9):
        op = sb.boundary_matrix(40, ca, 1.0)
        assert op.spectral_radius() < 1.0
        out = vec.copy()
        for _ in range(200):
            out = op.G @ out
        assert np.linalg.norm(out) < 1e-3 * np.linalg.norm(vec)


def test_boundary_matrix_fixed_eigenvalues_across_n():
    eigs = sb.fixed_boundary_eigenvalues(0.5, 1.0, sizes=(40, 80), floor=0.6)
    assert len(eigs) > 0
    sp = np.linalg.eigvals(sb.boundary_matrix(160, 0.5, 1.0).G)
    for z in eigs:
        assert np.abs(sp - z).min() < 1e-6


def test_no_near_unit_modes_at_cfl_limit():
    # all moduli stay below 0.999 for lambda <= 1.07, so the reproducibility
    # requirement on >0.999 modes holds with room to spare
    for N in (40, 80):
        sp = np.abs(np.linalg.eigvals(sb.boundary_matrix(N, 0.5, 1.07).G))
        assert sp.max() < 0.999


def test_boundary_periodic_variant_matches_symbol():
    N = 32
    Q1p, Q2p = sb.periodic_matrix(N, 0.8)
    G = sb.rk3_amplification(Q1p, Q2p, 0.8)
    eig = np.linalg.eigvals(G)
    sym = []
    for j in range(N):
        xi = 2 * np.pi * j / N
        q1, q2 = sb.periodic_symbol(np.array(xi))
        sym.extend(np.linalg.eigvals(sb.rk3_amplification(q1, q2, 0.8)))
    sym = np.array(sym)
    # set-wise match: every symbol eigenvalue appears in the assembled matrix
    for z in sym:
        assert np.abs(eig - z).min() < 1e-10


def test_boundary_matrix_rejects_small_n():
    with pytest.raises(Exception):
        sb.boundary_matrix(10, 0.5, 1.0)


@pytest.mark.slow
def test_alpha_range_k3_kd2():
    iv, _, _ = sb.alpha_range_search(3, 2, c_as=np.arange(0, 1, 0.02),
                                     lambdas=[0.55, 1.07])
    assert len(iv) == 1
    lo, hi = iv[0]
    assert lo == pytest.approx(0.93, abs=0.02)
    assert hi == pytest.approx(1.09, abs=0.02)


@pytest.mark.slow
def test_alpha_range_k3_kd1_empty():
    iv, _, _ = sb.alpha_range_search(3, 1, alphas=np.arange(0.5, 2.0, 0.05),
                                     c_as=np.arange(0, 1, 0.05), lambdas=[1.07])
    assert iv == []


def test_alpha_search_monotone_in_lambda_max():
    # shrinking the CFL ceiling can only enlarge the admissible set
    kwargs = dict(alphas=np.arange(0.8, 1.3, 0.05), c_as=np.arange(0, 1, 0.1))
    _, _, loose = sb.alpha_range_search(3, 2, lambda_max=0.8,
                                        lambdas=[0.4, 0.8], **kwargs)
    _, _, tight = sb.alpha_range_search(3, 2, lambda_max=1.07,
                                        lambdas=[0.4, 0.8, 1.07], **kwargs)
    assert np.all(loose >= tight)
