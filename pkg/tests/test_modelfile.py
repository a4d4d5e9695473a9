import numpy as np
import pytest

from odc.baselines import BaselineConfig, fcm_train
from odc.dialectics import DialecticalSystem
from odc.modelfile import dumps, load_model, loads, save_model
from odc.synthetic import gaussian_blobs


def test_system_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    s = DialecticalSystem(rng.random((5, 3)), forces=[3, 0, 9, 1, 2], chi_max=0.35, rng_seed=2**40 + 3,
                          generation_enabled=True, crisis_noise="scalar")
    save_model(tmp_path / "m.txt", s)
    back = load_model(tmp_path / "m.txt")
    assert isinstance(back, DialecticalSystem)
    assert np.array_equal(back.weights, s.weights)
    assert back.forces.tolist() == s.forces.tolist()
    assert back.params() == s.params()
    assert dumps(back) == dumps(s)


def test_codebook_round_trip():
    data, _ = gaussian_blobs(200, seed=1)
    cb = fcm_train(data, BaselineConfig(n_outputs=4, max_iters=20), "classical")
    back = loads(dumps(cb))
    assert back.method_tag == "CM" and back.params["variant"] == "classical"
    assert np.array_equal(back.centroids, cb.centroids)


def test_header_layout():
    text = dumps(DialecticalSystem([[0.1, 0.2]], rng_seed=7))
    lines = text.splitlines()
    assert lines[:5] == ["# odc model", "method = ODC", "dim = 2", "count = 1", "seed = 7"]
    assert lines[-1] == "pole 0 0.10000000000000001 0.20000000000000001"


def test_bad_files():
    with pytest.raises(ValueError):
        loads("hello\n")
    with pytest.raises(ValueError):
        loads("# odc model\nmethod = KM\ndim = 2\ncount = 2\npole 0 0.1 0.2\n")
