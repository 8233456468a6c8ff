import json

import numpy as np
import pytest

from psido.errors import DegreeError, ShapeMismatchError
from psido.symbols import (
    ClassicalSymbol,
    HomogeneousComponent,
    adjoint,
    commutator,
    compose,
    convolve_truncated,
    dagger_data,
    linear_combine,
    load_symbol,
    minimal_decay_constant,
    save_symbol,
    seminorm,
    x_derivative,
    xi_derivative,
)


def mode_sheet(cutoff, entries):
    """Scalar sheet with {mode: amplitude} entries, shape (2F+1, 1, 1)."""
    arr = np.zeros((2 * cutoff + 1, 1, 1), dtype=complex)
    for k, amp in entries.items():
        arr[k + cutoff, 0, 0] = amp
    return arr


def single_mode_symbol(degree, cutoff, plus_entries, minus_entries, trunc=None):
    comp = HomogeneousComponent.from_sheets(
        degree, mode_sheet(cutoff, plus_entries), mode_sheet(cutoff, minus_entries)
    )
    return ClassicalSymbol.from_components([comp], truncation_order=trunc)


def random_symbol(rng, rank, trunc, cutoff, scale=0.3, max_mode=None):
    if max_mode is None:
        max_mode = cutoff
    comps = []
    for m in range(0, -trunc - 1, -1):
        data = np.zeros((2, 2 * cutoff + 1, rank, rank), dtype=complex)
        for k in range(-max_mode, max_mode + 1):
            env = scale * np.exp(-abs(k) / 4.0)
            data[:, k + cutoff] = env * (
                rng.standard_normal((2, rank, rank))
                + 1j * rng.standard_normal((2, rank, rank))
            )
        comps.append(HomogeneousComponent(m, data))
    return ClassicalSymbol(rank, cutoff, trunc, tuple(comps))


# ---------------------------------------------------------------------------
# derivatives


def test_xi_derivative_drops_degree_with_sheet_signs():
    a = single_mode_symbol(-1, 4, {1: 1.0}, {1: 1.0})
    d = xi_derivative(a.component(-1))
    assert d.degree == -2
    np.testing.assert_array_equal(d.data[0], mode_sheet(4, {1: -1.0}))
    np.testing.assert_array_equal(d.data[1], mode_sheet(4, {1: 1.0}))


def test_xi_derivative_kills_degree_zero():
    a = single_mode_symbol(0, 2, {0: 1.0}, {0: 1.0})
    d = xi_derivative(a.component(0))
    assert np.all(d.data == 0)


def test_x_derivative_multiplies_by_mode():
    comp = HomogeneousComponent.from_sheets(
        0, mode_sheet(3, {-2: 1.0}), mode_sheet(3, {-2: 1.0})
    )
    d = x_derivative(comp)
    np.testing.assert_array_equal(d.data[0], mode_sheet(3, {-2: -2.0}))


def test_homogeneity_of_evaluation():
    rng = np.random.default_rng(7)
    a = random_symbol(rng, 2, 0, 5)
    comp = a.component(0)
    x = np.linspace(0, 2 * np.pi, 7)
    for degree in (-1, -3):
        c = HomogeneousComponent(degree, comp.data)
        for lam in (2.0, 5.5):
            left = c.evaluate(x, lam * 1.0)
            right = lam**degree * c.evaluate(x, 1.0)
            np.testing.assert_allclose(left, right, rtol=1e-13)
            left = c.evaluate(x, -lam)
            right = lam**degree * c.evaluate(x, -1.0)
            np.testing.assert_allclose(left, right, rtol=1e-13)


# ---------------------------------------------------------------------------
# composition


def test_convolution_against_naive_loop():
    rng = np.random.default_rng(3)
    F = 5
    a = rng.standard_normal((2, 2 * F + 1, 2, 2)) + 1j * rng.standard_normal(
        (2, 2 * F + 1, 2, 2)
    )
    b = rng.standard_normal((2, 2 * F + 1, 2, 2)) + 1j * rng.standard_normal(
        (2, 2 * F + 1, 2, 2)
    )
    out = convolve_truncated(a, b, F)
    naive = np.zeros_like(out)
    for o in range(-F, F + 1):
        for t in range(-F, F + 1):
            if abs(o - t) > F:
                continue
            for s in range(2):
                naive[s, o + F] += a[s, t + F] @ b[s, o - t + F]
    np.testing.assert_allclose(out, naive, rtol=1e-13, atol=1e-15)


def test_compose_single_mode_oracle():
    # a = b, degree -1, both sheets e^{ix}.  Hand/CAS expansion:
    #   degree -2: (e^{2ix}, e^{2ix})
    #   degree -3: (-e^{2ix}, +e^{2ix})
    #   degree -4: (+e^{2ix}, +e^{2ix})
    a = single_mode_symbol(-1, 4, {1: 1.0}, {1: 1.0}, trunc=4)
    ab = compose(a, a, 4)
    assert ab.component(0) is None and ab.component(-1) is None
    np.testing.assert_allclose(
        ab.component(-2).data[0], mode_sheet(4, {2: 1.0}), atol=1e-14
    )
    np.testing.assert_allclose(
        ab.component(-2).data[1], mode_sheet(4, {2: 1.0}), atol=1e-14
    )
    np.testing.assert_allclose(
        ab.component(-3).data[0], mode_sheet(4, {2: -1.0}), atol=1e-14
    )
    np.testing.assert_allclose(
        ab.component(-3).data[1], mode_sheet(4, {2: 1.0}), atol=1e-14
    )
    np.testing.assert_allclose(
        ab.component(-4).data[0], mode_sheet(4, {2: 1.0}), atol=1e-14
    )
    np.testing.assert_allclose(
        ab.component(-4).data[1], mode_sheet(4, {2: 1.0}), atol=1e-14
    )


def test_commutator_oracle():
    # a degree -1 sheets (e^{ix}, e^{ix}); b degree -1 sheets (1, 1).
    # CAS expansion of [a, b] at K = 4:
    #   degree -3: (+e^{ix}, -e^{ix}),  degree -4: (-e^{ix}, -e^{ix})
    a = single_mode_symbol(-1, 4, {1: 1.0}, {1: 1.0}, trunc=4)
    b = single_mode_symbol(-1, 4, {0: 1.0}, {0: 1.0}, trunc=4)
    c = commutator(a, b, 4)
    np.testing.assert_allclose(c.component(-2).data, 0 * c.component(-2).data, atol=1e-14)
    np.testing.assert_allclose(c.component(-3).data[0], mode_sheet(4, {1: 1.0}), atol=1e-14)
    np.testing.assert_allclose(c.component(-3).data[1], mode_sheet(4, {1: -1.0}), atol=1e-14)
    np.testing.assert_allclose(c.component(-4).data[0], mode_sheet(4, {1: -1.0}), atol=1e-14)
    np.testing.assert_allclose(c.component(-4).data[1], mode_sheet(4, {1: -1.0}), atol=1e-14)


def test_compose_is_bilinear():
    rng = np.random.default_rng(11)
    a = random_symbol(rng, 2, 3, 6)
    b = random_symbol(rng, 2, 3, 6)
    c = random_symbol(rng, 2, 3, 6)
    lhs = compose(linear_combine([2.0, -0.5], [a, b]), c, 3)
    rhs = linear_combine([2.0, -0.5], [compose(a, c, 3), compose(b, c, 3)])
    for m in range(0, -4, -1):
        l = lhs.component(m)
        r = rhs.component(m)
        if l is None and r is None:
            continue
        np.testing.assert_allclose(l.data, r.data, rtol=1e-13, atol=1e-14)


def test_leading_term_is_plain_product():
    rng = np.random.default_rng(13)
    a = random_symbol(rng, 2, 2, 6)
    b = random_symbol(rng, 2, 2, 6)
    ab = compose(a, b, 2)
    expected = convolve_truncated(
        a.component(0).data, b.component(0).data, a.cutoff
    )
    np.testing.assert_array_equal(ab.component(0).data, expected)


def test_associativity_to_truncation_on_band_limited_input():
    rng = np.random.default_rng(17)
    F = 12
    a = random_symbol(rng, 2, 3, F, max_mode=4)
    b = random_symbol(rng, 2, 3, F, max_mode=4)
    c = random_symbol(rng, 2, 3, F, max_mode=4)
    left = compose(compose(a, b, 3), c, 3)
    right = compose(a, compose(b, c, 3), 3)
    for m in range(0, -4, -1):
        np.testing.assert_allclose(
            left.component(m).data, right.component(m).data, rtol=1e-10, atol=1e-12
        )


# ---------------------------------------------------------------------------
# adjoint


def test_adjoint_of_degree_zero_is_pointwise_conjugate_transpose():
    rng = np.random.default_rng(19)
    a = random_symbol(rng, 3, 0, 5)
    astar = adjoint(a)
    np.testing.assert_array_equal(
        astar.component(0).data, dagger_data(a.component(0).data)
    )


def test_adjoint_is_an_involution():
    rng = np.random.default_rng(23)
    a = random_symbol(rng, 2, 4, 6)
    aa = adjoint(adjoint(a, 4), 4)
    for c in a.components:
        np.testing.assert_allclose(
            aa.component(c.degree).data, c.data, rtol=1e-12, atol=1e-14
        )


def test_adjoint_is_conjugate_linear():
    rng = np.random.default_rng(29)
    a = random_symbol(rng, 2, 2, 5)
    b = random_symbol(rng, 2, 2, 5)
    z = 1.5 - 2.0j
    lhs = adjoint(linear_combine([z, 1.0], [a, b]), 2)
    rhs = linear_combine([np.conj(z), 1.0], [adjoint(a, 2), adjoint(b, 2)])
    for m in range(0, -3, -1):
        np.testing.assert_allclose(
            lhs.component(m).data, rhs.component(m).data, rtol=1e-13, atol=1e-14
        )


# ---------------------------------------------------------------------------
# seminorms and decay


def test_seminorm_of_missing_component_is_zero():
    a = single_mode_symbol(0, 4, {0: 1.0}, {0: 1.0}, trunc=3)
    assert seminorm(a, 0, 0, 2) == 0.0


def test_seminorm_scales_exactly_under_dyadic_scaling():
    rng = np.random.default_rng(31)
    a = random_symbol(rng, 2, 3, 6)
    doubled = linear_combine([2.0], [a])
    for m in range(4):
        for alpha, beta in [(0, 0), (1, 2), (2, 1)]:
            assert seminorm(doubled, alpha, beta, m) == 2.0 * seminorm(a, alpha, beta, m)


def test_seminorm_triangle_inequality():
    rng = np.random.default_rng(37)
    a = random_symbol(rng, 2, 2, 6)
    b = random_symbol(rng, 2, 2, 6)
    s = linear_combine([1.0, 1.0], [a, b])
    for alpha, beta, m in [(0, 0, 0), (1, 1, 1), (2, 0, 2)]:
        assert seminorm(s, alpha, beta, m) <= (
            seminorm(a, alpha, beta, m) + seminorm(b, alpha, beta, m) + 1e-12
        )


def test_seminorm_grid_sup_is_converged():
    # The sup from the default 8F scan agrees with a doubled scan grid.
    rng = np.random.default_rng(41)
    a = random_symbol(rng, 2, 2, 8)
    for alpha, beta, m in [(0, 0, 0), (1, 1, 1), (2, 2, 2)]:
        coarse = seminorm(a, alpha, beta, m, grid_points=8 * a.cutoff)
        fine = seminorm(a, alpha, beta, m, grid_points=16 * a.cutoff)
        assert abs(coarse - fine) <= 1e-6 * max(fine, 1.0)


def test_seminorm_example_values():
    a = ClassicalSymbol.constant(np.eye(3), truncation_order=1, cutoff=2)
    assert seminorm(a, 0, 0, 0) == pytest.approx(1.0, abs=1e-12)
    b = single_mode_symbol(-1, 4, {1: 1.0}, {}, trunc=1)
    assert seminorm(b, 0, 1, 1) == pytest.approx(1.0, rel=1e-12)


def test_xi_derivative_matches_finite_differences():
    # Central differences of the evaluation map at xi = +/-1.5, step 1e-4.
    rng = np.random.default_rng(47)
    a = random_symbol(rng, 2, 3, 5)
    x = np.linspace(0, 2 * np.pi, 9)
    for degree in (-1, -2):
        comp = a.component(degree)
        deriv = xi_derivative(comp)
        for xi0 in (1.5, -1.5):
            h = 1e-4
            fd = (comp.evaluate(x, xi0 + h) - comp.evaluate(x, xi0 - h)) / (2 * h)
            np.testing.assert_allclose(fd, deriv.evaluate(x, xi0), rtol=1e-6)


def test_decay_constant_zero_symbol():
    assert minimal_decay_constant(ClassicalSymbol.zero(2, 3, 4)) == 0.0


def test_decay_constant_identity():
    a = ClassicalSymbol.constant(np.eye(2), truncation_order=2, cutoff=3)
    assert minimal_decay_constant(a) == pytest.approx(1.0, abs=1e-14)


def test_decay_constant_pure_order_minus_one():
    # Constant sheets (c, c) at degree -1: the sup of c (1+|xi|)/|xi| over
    # |xi| >= 1 is 2c, attained at |xi| = 1; the alpha = 1 branch gives the
    # same value.
    c = 0.7
    a = single_mode_symbol(-1, 3, {0: c}, {0: c}, trunc=1)
    assert minimal_decay_constant(a) == pytest.approx(2 * c, rel=1e-12)


# ---------------------------------------------------------------------------
# validation and serialization


def test_rank_mismatch_rejected():
    a = single_mode_symbol(0, 3, {0: 1.0}, {0: 1.0})
    b = ClassicalSymbol.constant(np.eye(2), cutoff=3)
    with pytest.raises(ShapeMismatchError):
        compose(a, b)


def test_cutoff_mismatch_rejected():
    a = single_mode_symbol(0, 3, {0: 1.0}, {0: 1.0})
    b = single_mode_symbol(0, 4, {0: 1.0}, {0: 1.0})
    with pytest.raises(ShapeMismatchError):
        linear_combine([1.0, 1.0], [a, b])


def test_positive_degree_rejected():
    with pytest.raises(DegreeError):
        HomogeneousComponent.from_sheets(1, mode_sheet(2, {}), mode_sheet(2, {}))


def test_degree_below_truncation_rejected():
    comp = HomogeneousComponent.from_sheets(-3, mode_sheet(2, {0: 1.0}), mode_sheet(2, {}))
    with pytest.raises(DegreeError):
        ClassicalSymbol(1, 2, 2, (comp,))


def test_symbol_data_is_immutable():
    a = single_mode_symbol(0, 2, {0: 1.0}, {0: 1.0})
    with pytest.raises(ValueError):
        a.component(0).data[0, 0, 0, 0] = 5.0


def test_serialization_round_trip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(43)
    a = random_symbol(rng, 2, 3, 5)
    path = tmp_path / "symbol.json"
    save_symbol(a, path)
    b = load_symbol(path)
    assert (b.rank, b.cutoff, b.truncation_order) == (a.rank, a.cutoff, a.truncation_order)
    for c in a.components:
        np.testing.assert_array_equal(b.component(c.degree).data, c.data)
    # a second save must reproduce the file byte for byte
    path2 = tmp_path / "symbol2.json"
    save_symbol(b, path2)
    assert path.read_bytes() == path2.read_bytes()


def test_serialized_document_is_json(tmp_path):
    a = single_mode_symbol(-1, 2, {1: 0.5 + 0.25j}, {0: -1.0})
    path = tmp_path / "s.json"
    save_symbol(a, path)
    doc = json.loads(path.read_text())
    assert doc["rank"] == 1 and doc["cutoff"] == 2
    assert doc["components"][0]["degree"] == -1
