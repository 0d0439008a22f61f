"""Coupling-matrix assembly: static part, perturbation coefficients,
stencil mapping, and the quadratic-form equivalence oracle."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from entemp import (
    AssemblyError,
    DomainError,
    LatticeConfig,
    MetricSpec,
    assemble,
    build_k0,
    first_order_coeffs,
    second_order_coeffs,
    shift_factors,
)

SBH = MetricSpec("schwarzschild")
FLAT = MetricSpec("flat")
RN3 = MetricSpec("reissner_nordstrom", q=0.3)


def cfg(N, n, l=0, dim=2):
    return LatticeConfig(N=N, n=n, l=l, dim=dim)


# -- static part -------------------------------------------------------------

def test_k0_two_site_pins():
    K = build_k0(cfg(2, 1))
    assert_allclose(K[0, 0], 2.25, rtol=1e-15)
    assert_allclose(K[0, 1], -1.125, rtol=1e-15)
    assert_allclose(K[1, 0], -1.125, rtol=1e-15)
    assert_allclose(K[1, 1], 2.125, rtol=1e-15)


def test_k0_channel_shift_is_centrifugal_diagonal():
    K0 = build_k0(cfg(12, 6, l=0))
    K5 = build_k0(cfg(12, 6, l=5))
    j = np.arange(1, 13, dtype=float)
    assert_allclose(K5 - K0, np.diag(30.0 / j**2), rtol=1e-14)


def test_k0_positive_definite():
    w = np.linalg.eigvalsh(build_k0(cfg(3, 1)))
    assert w[0] > 0


def test_k0_energy_matches_characteristic_polynomial_roots():
    K = build_k0(cfg(3, 1))
    roots = np.sort(np.roots(np.poly(K)).real)
    assert_allclose(
        0.5 * np.sum(np.sqrt(roots)),
        0.5 * np.sum(np.sqrt(np.linalg.eigvalsh(K))),
        rtol=1e-12,
    )


def test_lattice_config_validation():
    with pytest.raises(DomainError):
        cfg(10, 10)
    with pytest.raises(DomainError):
        cfg(10, 0)
    with pytest.raises(DomainError):
        cfg(10, 5, l=-1)


# -- perturbation coefficients ----------------------------------------------

def _unexpanded_first_order(m, c, r, s, sp):
    """The first-order density before expansion, for the oracle."""
    sf = shift_factors(m, r)
    D, l = c.dim, c.l
    a = -D * s + 2.0 * r * sp
    b = (D * sf.lap1 * s - 2.0 * r * sf.lap1 * sp
         + 2.0 * D * r * sf.drad1 * s - r * sf.dlap1 * s)
    return a * b / (4.0 * r * r) + 2.0 * l * (l + D - 1) * sf.rad1 * s * s / (r * r)


@pytest.mark.parametrize("metric,r", [
    (SBH, 2.0), (SBH, 1.0), (SBH, 0.5),
    (RN3, 1.5), (RN3, 3.7), (FLAT, 2.2),
])
@pytest.mark.parametrize("l,dim", [(0, 2), (3, 2), (1, 3)])
def test_first_order_expansion_against_numeric_oracle(metric, r, l, dim):
    c = cfg(16, 8, l=l, dim=dim)
    co = first_order_coeffs(metric, c, r)
    rng = np.random.default_rng(42)
    for _ in range(100):
        s, sp = rng.normal(size=2)
        direct = _unexpanded_first_order(metric, c, r, s, sp)
        expanded = co.grad * sp * sp + co.mix * s * sp + co.pot * s * s
        assert_allclose(expanded, direct, rtol=1e-10, atol=1e-12)


def test_first_order_flat_has_no_gradient_term():
    co = first_order_coeffs(FLAT, cfg(16, 8), 2.0)
    assert co.grad == 0.0


def test_first_order_centrifugal_term_scales_with_channel():
    c0 = first_order_coeffs(SBH, cfg(16, 8, l=0), 2.0)
    c2 = first_order_coeffs(SBH, cfg(16, 8, l=2), 2.0)
    sf = shift_factors(SBH, 2.0)
    assert_allclose(c2.pot - c0.pot, 2 * 2 * 3 * sf.rad1 / 4.0, rtol=1e-13)
    assert c2.grad == c0.grad and c2.mix == c0.mix


def test_second_order_flat_potential_value():
    # sympy oracle: only the radius-dilation terms survive, giving
    # -D^2 R1 R1'/(2r) + D^2 R1'^2 / 4 = 2/81 + 1/81 = 1/27 at r=3, D=2
    co = second_order_coeffs(FLAT, cfg(16, 8, l=0), 3.0)
    assert co.grad == 0.0
    assert_allclose(co.pot, 1.0 / 27.0, rtol=1e-13)


def test_second_order_uncharged_matches_schwarzschild():
    q0 = MetricSpec("reissner_nordstrom", q=0.0)
    for r in (0.8, 1.0, 2.4, 6.0):
        a = second_order_coeffs(q0, cfg(16, 8, l=1), r)
        b = second_order_coeffs(SBH, cfg(16, 8, l=1), r)
        assert a == b


# -- assembly ----------------------------------------------------------------

def test_assembly_at_zero_offset_is_static():
    cm = assemble(SBH, cfg(20, 10))
    assert_allclose(cm.coupling(0.0), build_k0(cfg(20, 10)), rtol=0, atol=0)


def test_assembly_symmetric_bandwidth_two():
    cm = assemble(SBH, cfg(8, 4))
    for K in (cm.k1, cm.k2):
        assert np.array_equal(K, K.T)
        i, j = np.nonzero(K)
        assert np.max(np.abs(i - j)) <= 2


def test_quadratic_offset_structure_is_exact():
    cm = assemble(RN3, cfg(24, 12, l=2))
    Kp = cm.coupling(1.0, check=False)
    Km = cm.coupling(-1.0, check=False)
    K0 = cm.coupling(0.0, check=False)
    for e in (0.013, 0.4, 2.2):
        expected = K0 + e * (Kp - Km) / 2 + e * e * (Kp - 2 * K0 + Km) / 2
        assert_allclose(cm.coupling(e, check=False), expected,
                        rtol=1e-13, atol=1e-13)


def test_flat_stays_positive_definite_to_large_offsets():
    # dilation-only couplings on the exterior: PD far beyond the sweep range
    cm = assemble(FLAT, cfg(60, 30))
    for e in (0.05, 0.5, 3.0):
        w = np.linalg.eigvalsh(cm.coupling(e, check=False))
        assert w[0] > 0


def test_positive_definiteness_failure_reports_offset():
    cm = assemble(SBH, cfg(40, 20), branch="ingoing")
    with pytest.raises(AssemblyError) as err:
        cm.coupling(6.0)
    assert err.value.eps == 6.0
    assert err.value.min_eigenvalue < 0


def test_uncharged_assembly_matches_schwarzschild_entrywise():
    q0 = MetricSpec("reissner_nordstrom", q=0.0)
    a = assemble(q0, cfg(30, 15, l=1))
    b = assemble(SBH, cfg(30, 15, l=1))
    assert np.array_equal(a.k1, b.k1)
    assert np.array_equal(a.k2, b.k2)


def test_interior_sites_carry_no_couplings():
    cm = assemble(SBH, cfg(30, 15))
    # strictly interior block (sites 1..n-2 touch nothing perturbed)
    inner = slice(0, 12)
    assert not cm.k1[inner, inner].any()
    assert not cm.k2[inner, inner].any()
    # the horizon site couples across the cut
    assert cm.k1[14, 15] != 0.0


def test_outgoing_branch_flips_first_order_only():
    out = assemble(SBH, cfg(20, 10), branch="outgoing")
    inn = assemble(SBH, cfg(20, 10), branch="ingoing")
    assert_allclose(out.k1, -inn.k1, rtol=0, atol=0)
    assert_allclose(out.k2, inn.k2, rtol=0, atol=0)


def test_channel_dependence_is_affine_diagonal():
    # K_i(l) - K_i(0) must be l(l+D-1) times a fixed diagonal
    a0 = assemble(SBH, cfg(24, 12, l=0, dim=2))
    a2 = assemble(SBH, cfg(24, 12, l=2, dim=2))
    a5 = assemble(SBH, cfg(24, 12, l=5, dim=2))
    for low, high, ratio in [(a2, a5, 30.0 / 6.0)]:
        for k_lo, k_hi, k_0 in [(low.k1, high.k1, a0.k1),
                                (low.k2, high.k2, a0.k2)]:
            d_lo = k_lo - k_0
            d_hi = k_hi - k_0
            assert np.count_nonzero(d_lo - np.diag(np.diag(d_lo))) == 0
            assert_allclose(d_hi, ratio * d_lo, rtol=1e-13, atol=1e-18)


# -- quadratic-form equivalence oracle ----------------------------------------
#
# The primary guard against expansion mistakes: the assembled quadratic
# forms must reproduce a direct lattice quadrature of the unexpanded
# densities, with the matching difference stencils.

def _direct_quadrature(metric, N, n, l, dim, order, sigma):
    h = 1.0 / n
    total = 0.0
    for j in range(1, N + 1):
        r = j / n
        if r < 1.0 - 1e-12:
            continue
        s = sigma[j - 1]
        if j == 1:
            sp = (sigma[1] - sigma[0]) / h
        elif j == N:
            sp = (sigma[N - 1] - sigma[N - 2]) / h
        else:
            sp = (sigma[j] - sigma[j - 2]) / (2.0 * h)
        if order == 1:
            total += _unexpanded_first_order(
                metric, cfg(N, n, l=l, dim=dim), r, s, sp)
        else:
            co = second_order_coeffs(metric, cfg(N, n, l=l, dim=dim), r)
            total += co.grad * sp * sp + co.mix * s * sp + co.pot * s * s
    return h * h * total


@pytest.mark.parametrize("metric", [SBH, RN3])
def test_quadratic_form_equivalence(metric):
    N, n, l, dim = 40, 20, 2, 2
    cm = assemble(metric, cfg(N, n, l=l, dim=dim), branch="ingoing")
    rng = np.random.default_rng(7)
    for _ in range(50):
        sigma = rng.normal(size=N)
        q1 = sigma @ cm.k1 @ sigma
        d1 = _direct_quadrature(metric, N, n, l, dim, 1, sigma)
        assert_allclose(q1, d1, rtol=1e-8, atol=1e-12)
        q2 = sigma @ cm.k2 @ sigma
        d2 = _direct_quadrature(metric, N, n, l, dim, 2, sigma)
        assert_allclose(q2, d2, rtol=1e-8, atol=1e-12)
