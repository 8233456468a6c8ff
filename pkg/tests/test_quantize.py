import numpy as np
import pytest

from psido.errors import ConfigError, PowerIterationError, ShapeMismatchError
from psido.quantize import (
    OperatorMatrix,
    SectionVector,
    apply,
    composition_defect,
    load_operator,
    operator_norm,
    quantize,
    restricted_norm,
    save_operator,
    sobolev_norm,
)
from psido.symbols import ClassicalSymbol, HomogeneousComponent, compose, linear_combine


def mode_sheet(cutoff, entries):
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
# matrix assembly


def test_identity_symbol_quantizes_to_identity_minus_zero_mode():
    ell, j_cut = 2, 5
    a = ClassicalSymbol.constant(np.eye(ell))
    op = quantize(a, j_cut)
    expected = np.eye(ell * (2 * j_cut + 1), dtype=complex)
    zero_block = j_cut * ell
    expected[zero_block : zero_block + ell, zero_block : zero_block + ell] = 0.0
    np.testing.assert_array_equal(op.data, expected)


def test_single_oscillating_mode_quantizes_to_shift():
    j_cut = 6
    a = single_mode_symbol(0, 1, {1: 1.0}, {1: 1.0})
    op = quantize(a, j_cut)
    expected = np.zeros((2 * j_cut + 1, 2 * j_cut + 1), dtype=complex)
    for j in range(-j_cut, j_cut):
        if j != 0:
            expected[j + 1 + j_cut, j + j_cut] = 1.0
    np.testing.assert_array_equal(op.data, expected)


def test_inverse_order_symbol_quantizes_to_diagonal():
    j_cut = 7
    a = single_mode_symbol(-1, 0, {0: 1.0}, {0: 1.0})
    op = quantize(a, j_cut)
    js = np.arange(-j_cut, j_cut + 1)
    expected = np.zeros(2 * j_cut + 1)
    expected[js != 0] = 1.0 / np.abs(js[js != 0])
    np.testing.assert_array_equal(op.data, np.diag(expected.astype(complex)))


def test_blocks_match_direct_assembly():
    rng = np.random.default_rng(11)
    ell, trunc, band, j_cut = 2, 2, 2, 6
    a = random_symbol(rng, ell, trunc, band)
    op = quantize(a, j_cut)
    for j in range(-j_cut, j_cut + 1):
        for k in range(-j_cut, j_cut + 1):
            block = np.zeros((ell, ell), dtype=complex)
            if j != 0 and abs(k - j) <= band:
                sheet = 0 if j > 0 else 1
                for comp in a.components:
                    block += comp.data[sheet, k - j + band] * float(
                        abs(j) ** comp.degree
                    )
            np.testing.assert_allclose(op.block(k, j), block, atol=1e-15)


def test_quantize_rejects_window_smaller_than_band():
    a = single_mode_symbol(0, 4, {1: 1.0}, {1: 1.0})
    with pytest.raises(ConfigError):
        quantize(a, 3)


def test_quantize_linearity():
    rng = np.random.default_rng(3)
    a = random_symbol(rng, 2, 2, 3)
    b = random_symbol(rng, 2, 2, 3)
    combo = linear_combine([0.7, -1.3j], [a, b])
    lhs = quantize(combo, 8).data
    rhs = 0.7 * quantize(a, 8).data + (-1.3j) * quantize(b, 8).data
    np.testing.assert_allclose(lhs, rhs, atol=1e-14)


def test_quantize_dyadic_scaling_is_bitwise_exact():
    rng = np.random.default_rng(4)
    a = random_symbol(rng, 2, 3, 4)
    op = quantize(a, 9)
    for i in (2, 4, 8, 16):
        scaled = linear_combine([1.0 / i], [a])
        np.testing.assert_array_equal(quantize(scaled, 9).data, op.data / i)


# ---------------------------------------------------------------------------
# sections and Sobolev norms


def test_sobolev_norm_constant_mode():
    f = SectionVector.single_mode(1, 5, 0, [1.0])
    for s in (0.0, 1.0, 2.5, -1.0):
        assert abs(sobolev_norm(f, s) - np.sqrt(2 * np.pi)) < 1e-14


def test_sobolev_norm_unit_loop_mode():
    f = SectionVector.single_mode(1, 5, 1, [1.0])
    assert abs(sobolev_norm(f, 3.0) - np.sqrt(2 * np.pi * 8.0)) < 1e-13


def test_sobolev_norm_monotone_in_s():
    rng = np.random.default_rng(8)
    coeff = rng.standard_normal((11, 2)) + 1j * rng.standard_normal((11, 2))
    f = SectionVector(2, 5, coeff)
    values = [sobolev_norm(f, s) for s in (0.0, 0.5, 1.0, 2.0, 3.0)]
    assert all(v2 >= v1 for v1, v2 in zip(values, values[1:]))


def test_apply_shift_moves_modes():
    a = single_mode_symbol(0, 1, {1: 1.0}, {1: 1.0})
    op = quantize(a, 4)
    f = SectionVector.single_mode(1, 4, 2, [1.0])
    out = apply(op, f)
    np.testing.assert_array_equal(out.mode(3), [1.0])
    assert np.count_nonzero(out.coefficients) == 1


def test_section_shape_validation():
    with pytest.raises(ShapeMismatchError):
        SectionVector(2, 3, np.zeros((7, 1), dtype=complex))
    with pytest.raises(ShapeMismatchError):
        SectionVector.single_mode(1, 3, 5, [1.0])


# ---------------------------------------------------------------------------
# operator norms


def test_operator_norm_identity_minus_zero_mode_is_one():
    a = ClassicalSymbol.constant(np.eye(2))
    op = quantize(a, 6)
    for s in (0.0, 1.5):
        assert abs(operator_norm(op, s, s) - 1.0) < 1e-12


def test_operator_norm_diagonal_decay_is_one():
    a = single_mode_symbol(-1, 0, {0: 1.0}, {0: 1.0})
    op = quantize(a, 16)
    assert abs(operator_norm(op, 0.0, 0.0) - 1.0) < 1e-8


def test_operator_norm_matches_dense_svd():
    rng = np.random.default_rng(21)
    a = random_symbol(rng, 2, 3, 4)
    op = quantize(a, 10)
    s_from, s_to = 1.0, 0.5
    js = np.arange(-10, 11).astype(float)
    d_to = np.repeat((1.0 + js**2) ** (s_to / 2.0), 2)
    d_from = np.repeat((1.0 + js**2) ** (s_from / 2.0), 2)
    dense = np.linalg.norm(op.data * d_to[:, None] / d_from[None, :], ord=2)
    assert abs(operator_norm(op, s_from, s_to) - dense) < 1e-7 * dense


def test_operator_norm_dyadic_scaling_is_bitwise_exact():
    rng = np.random.default_rng(22)
    a = random_symbol(rng, 2, 2, 3)
    base = operator_norm(quantize(a, 8))
    for i in (2, 8):
        scaled = linear_combine([1.0 / i], [a])
        assert operator_norm(quantize(scaled, 8)) == base / i


def test_operator_norm_zero_matrix():
    op = OperatorMatrix(1, 3, np.zeros((7, 7), dtype=complex))
    assert operator_norm(op) == 0.0


def test_operator_norm_iteration_cap_raises_with_state():
    rng = np.random.default_rng(23)
    a = random_symbol(rng, 2, 2, 3)
    op = quantize(a, 8)
    with pytest.raises(PowerIterationError) as info:
        operator_norm(op, max_iterations=1)
    assert info.value.estimate > 0.0
    assert info.value.iterate.shape == (op.size,)


def test_operator_norm_bounds_sobolev_quotients():
    rng = np.random.default_rng(24)
    a = random_symbol(rng, 2, 2, 4)
    op = quantize(a, 9)
    bound = operator_norm(op, 1.0, 0.0)
    for _ in range(5):
        coeff = rng.standard_normal((19, 2)) + 1j * rng.standard_normal((19, 2))
        f = SectionVector(2, 9, coeff)
        assert sobolev_norm(apply(op, f), 0.0) <= bound * sobolev_norm(f, 1.0) * (1 + 1e-9)


# ---------------------------------------------------------------------------
# composition defect


def test_defect_of_zero_symbol_is_zero_matrix():
    rng = np.random.default_rng(31)
    b = random_symbol(rng, 2, 2, 3)
    zero = ClassicalSymbol.zero(2, 2, 3)
    defect = composition_defect(zero, b, 2, 8)
    assert not np.any(defect.data)


def multiplication_symbol(rng, rank, band, max_mode):
    """xi-independent degree-0 symbol: both sheets carry the same function."""
    sym = random_symbol(rng, rank, 0, band, max_mode=max_mode)
    data = sym.component(0).data.copy()
    data[1] = data[0]
    comp = HomogeneousComponent(0, data)
    return ClassicalSymbol(rank, band, 0, (comp,))


def test_multiplication_defect_is_excision_rank_one():
    # xi-independent symbols whose mode supports fit inside half the band
    # keep the full product inside the truncation, so the only defect is the
    # missing j = 0 intermediate: block (k, j) = -psi(j) a_hat(k) @ b_hat(-j).
    rng = np.random.default_rng(32)
    ell, band, j_cut = 2, 8, 24
    a = multiplication_symbol(rng, ell, band, 4)
    b = multiplication_symbol(rng, ell, band, 4)
    defect = composition_defect(a, b, 0, j_cut)
    da = a.component(0).data[0]
    db = b.component(0).data[0]
    for j in range(-(j_cut - 2 * band), j_cut - 2 * band + 1):
        for k in range(-band, band + 1):
            expected = -da[k + band] @ db[-j + band] if j != 0 and abs(j) <= band else 0 * da[0]
            np.testing.assert_allclose(defect.block(k, j), expected, atol=5e-14)
    # columns beyond the mode support of b and clear of the window edge vanish
    js = np.arange(-j_cut, j_cut + 1)
    interior = (np.abs(js) > 4) & (np.abs(js) <= j_cut - band)
    cols = np.repeat(interior, ell)
    assert np.max(np.abs(defect.data[:, cols])) < 5e-14


def test_defect_decay_slope_tracks_truncation_depth():
    band = 8
    a = single_mode_symbol(-1, band, {1: 1.0}, {1: 1.0}, trunc=4)
    windows = [32, 64, 128, 256]
    quantized = {}
    for j_cut in windows:
        q = quantize(a, j_cut)
        quantized[j_cut] = (q @ q, j_cut)
    for depth in (2, 3, 4):
        norms = []
        for j_cut in windows:
            square, _ = quantized[j_cut]
            product = quantize(compose(a, a, depth), j_cut)
            defect = square - product
            norms.append(restricted_norm(defect, j_cut // 4, j_cut // 2))
        slope = np.polyfit(np.log(windows), np.log(norms), 1)[0]
        assert -(depth + 1) - 0.5 < slope < -(depth + 1) + 0.5


def test_restricted_norm_band_validation():
    op = OperatorMatrix(1, 4, np.zeros((9, 9), dtype=complex))
    with pytest.raises(ConfigError):
        restricted_norm(op, 3, 2)
    with pytest.raises(ConfigError):
        restricted_norm(op, 0, 5)


def test_restricted_norm_picks_band_maximum():
    a = single_mode_symbol(-1, 0, {0: 1.0}, {0: 1.0})
    op = quantize(a, 12)
    assert abs(restricted_norm(op, 3, 6) - 1.0 / 3.0) < 1e-14
    assert abs(restricted_norm(op, 1, 12) - 1.0) < 1e-14


# ---------------------------------------------------------------------------
# dump format


def test_operator_dump_round_trip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(41)
    a = random_symbol(rng, 2, 2, 3)
    op = quantize(a, 6)
    path = tmp_path / "op.bin"
    save_operator(op, str(path))
    back = load_operator(str(path))
    assert back.rank == op.rank and back.cutoff == op.cutoff
    np.testing.assert_array_equal(back.data, op.data)


def test_operator_dump_header_is_documented_ascii(tmp_path):
    op = OperatorMatrix(1, 1, np.eye(3, dtype=complex))
    path = tmp_path / "op.bin"
    save_operator(op, str(path))
    raw = path.read_bytes()
    header, _, payload = raw.partition(b"\n")
    assert header == b"psido-operator 1 1 1"
    assert len(payload) == 3 * 3 * 2 * 8


def test_operator_dump_rejects_foreign_files(tmp_path):
    path = tmp_path / "junk.bin"
    path.write_bytes(b"something else entirely\n\x00\x01")
    with pytest.raises(ConfigError):
        load_operator(str(path))
