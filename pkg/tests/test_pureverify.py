import numpy as np
import pytest

from entprobe.errors import NoSupportFound, NotPureInput
from entprobe.measure import StateOracle, pure_budgets
from entprobe.pureverify import VerifyConfig, reconstruct_party, verify_pure_product
from entprobe.qcore import (
    MINUS,
    PLUS,
    DensityMatrix,
    PureState,
    bell,
    ghz,
    ket,
    maximally_mixed,
    partial_trace,
    product_vector,
    random_density,
    random_product,
    random_pure,
    w,
)
from entprobe.separability import pure_is_product, reduced_purities

SHAPES = [(2, 2), (2, 2, 2), (3, 2), (4, 3, 2), (3, 3, 3)]


def test_party_plus_zero():
    oracle = StateOracle(PureState((2, 2), product_vector(PLUS, ket(2, 0))))
    rec = reconstruct_party(oracle, 2)
    assert rec.l == 0
    np.testing.assert_allclose(rec.alphas, [1, 0], atol=1e-15)
    assert rec.s == pytest.approx(1, abs=1e-15)
    assert rec.observables_used == 3


def test_party_zero_one():
    oracle = StateOracle(PureState((2, 2), product_vector(ket(2, 0), ket(2, 1))))
    rec = reconstruct_party(oracle, 2)
    assert rec.l == 1
    np.testing.assert_allclose(rec.alphas, [1])
    assert rec.s == 1
    assert rec.observables_used == 2


def test_party_bell():
    rec = reconstruct_party(StateOracle(bell()), 2)
    assert rec.l == 0
    np.testing.assert_allclose(rec.alphas, [1 / np.sqrt(2), 0], atol=1e-15)
    assert rec.s == pytest.approx(0.5, abs=1e-15)


def test_no_support_on_corrupted_oracle():
    # a valid state always has some level above tau_zero; a zero operator does not
    corrupt = DensityMatrix((2, 2), np.zeros((4, 4)), validate=False)
    with pytest.raises(NoSupportFound):
        reconstruct_party(StateOracle(corrupt), 2)


def test_config_validation():
    with pytest.raises(ValueError):
        VerifyConfig(epsilon_norm=0)
    with pytest.raises(ValueError):
        VerifyConfig(tau_zero=1e-2)


def test_product_three_qubits():
    psi = PureState((2, 2, 2), product_vector(ket(2, 0), PLUS, ket(2, 1)))
    oracle = StateOracle(psi)
    v = verify_pure_product(oracle)
    assert v.b == 0
    assert v.total_observables <= 6
    assert v.reconstructed_state.shape.dims == (2, 2)
    np.testing.assert_allclose(v.reconstructed_state.amplitudes, product_vector(PLUS, ket(2, 1)), atol=1e-15)
    assert all(not lbl.endswith("@1") for lbl in oracle.ledger.labels)


def test_ghz3_entangled_at_party_2():
    v = verify_pure_product(StateOracle(ghz(3)))
    assert v.b == 1
    assert [r.k for r in v.reconstructions] == [2]
    assert v.reconstructions[-1].s == pytest.approx(0.5, abs=1e-15)
    assert v.reconstructed_state is None


def test_entangled_only_at_last_party():
    # party 2 product, parties 1 and 3 entangled
    v3 = np.zeros(8, dtype=complex)
    for a in (0, 1):
        v3[a * 4 + 0 * 2 + a] = 1 / np.sqrt(2)
    psi = PureState((2, 2, 2), v3)
    v = verify_pure_product(StateOracle(psi))
    assert v.b == 1 and [r.k for r in v.reconstructions] == [2, 3]


def test_mixed_oracle_refused():
    with pytest.raises(NotPureInput):
        verify_pure_product(StateOracle(maximally_mixed((2, 2))))


def test_pure_density_oracle_accepted():
    v = verify_pure_product(StateOracle(random_product((2, 3), seed=1).density()))
    assert v.b == 0


def test_verdict_json():
    v = verify_pure_product(StateOracle(ghz(3)))
    js = v.to_json()
    assert js["b"] == 1 and js["total_observables"] == v.total_observables
    assert js["parties"][0]["alphas"][0] == [pytest.approx(1 / np.sqrt(2)), 0.0]


@pytest.mark.parametrize("dims", SHAPES)
def test_random_products(dims):
    rng = np.random.default_rng(sum(dims))
    upper = pure_budgets(dims)[0]
    for _ in range(40):
        psi = random_product(dims, rng)
        oracle = StateOracle(psi)
        v = verify_pure_product(oracle)
        assert v.b == 0
        assert v.total_observables <= upper
        # generic products have l = 0 everywhere, which realizes the bound
        assert v.total_observables == upper
        assert all(not lbl.endswith("@1") for lbl in oracle.ledger.labels)
        for rec, d in zip(v.reconstructions, dims[1:]):
            phi = rec.factor(d)
            red = partial_trace(psi, [rec.k]).matrix
            assert np.real(np.vdot(phi, red @ phi)) >= 1 - 1e-8


@pytest.mark.parametrize("dims", SHAPES)
def test_random_entangled(dims):
    rng = np.random.default_rng(100 + sum(dims))
    for _ in range(40):
        psi = random_pure(dims, rng)
        assert min(reduced_purities(psi)[1:]) < 1 - 1e-6
        v = verify_pure_product(StateOracle(psi))
        assert v.b == 1
        assert abs(v.reconstructions[-1].s - 1) > 1e-9


def test_structured_states_agree_with_purity_oracle():
    cases = [
        bell(),
        ghz(3),
        w(3),
        PureState((2, 2, 2), product_vector(bell().amplitudes, ket(2, 0))),
        PureState((2, 2, 2), product_vector(ket(2, 1), bell().amplitudes)),
        PureState((2, 2, 2), product_vector(MINUS, MINUS, MINUS)),
        PureState((3, 2), product_vector(ket(3, 2), ket(2, 1))),
    ]
    for psi in cases:
        assert verify_pure_product(StateOracle(psi)).b == (0 if pure_is_product(psi) else 1)
