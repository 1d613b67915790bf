import numpy as np
import pytest

from maskcorr.utils.errors import InvalidStateError
from maskcorr.utils.helpers import (
    derive_seed,
    get_default_seed,
    get_default_workers,
    get_log_level,
    normalize_qubit,
    parse_inline_state,
)


def test_parse_inline_state():
    amps = parse_inline_state(" 0.6, 0 ,0,0.8")
    np.testing.assert_allclose(amps, [0.6, 0.8j])


def test_inline_state_renormalized_exactly():
    amps = parse_inline_state("0.7071068,0,0.7071068,0")
    assert np.linalg.norm(amps) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("text", ["", "1,0,0", "1,0,0,0,0", "x,0,0,0", "0,0,0,0", "1,0,1,0", "nan,0,0,0"])
def test_parse_inline_state_rejects(text):
    with pytest.raises(InvalidStateError):
        parse_inline_state(text)


def test_normalize_qubit_size():
    with pytest.raises(InvalidStateError):
        normalize_qubit(np.array([1, 0, 0, 0]))


def test_derive_seed_is_stable():
    assert derive_seed(42, "masking") == derive_seed(42, "masking")
    assert derive_seed(42, "masking") != derive_seed(43, "masking")
    assert 0 <= derive_seed(0, "x") < 2 ** 32


def test_env_defaults(monkeypatch):
    monkeypatch.setenv("MASKCORR_SEED", "17")
    monkeypatch.setenv("MASKCORR_WORKERS", "0")
    monkeypatch.setenv("MASKCORR_LOG_LEVEL", "debug")
    assert get_default_seed() == 17
    assert get_default_workers() == 1
    assert get_log_level() == "DEBUG"


def test_bad_env_seed_falls_back(monkeypatch):
    monkeypatch.setenv("MASKCORR_SEED", "forty-two")
    assert get_default_seed() == 42
