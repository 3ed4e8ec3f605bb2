import json

import numpy as np

from mhlab import random_filtration, random_martingale
from mhlab.exchange import dump_exchange, load_exchange


def test_roundtrip_bit_exact():
    F = random_filtration(4, 4)
    mgs = {"f": random_martingale(1, F), "g": random_martingale(2, F, scale=1e-7)}
    G, back = load_exchange(dump_exchange(F, mgs))
    assert G == F
    np.testing.assert_array_equal(G.probs, F.probs)
    for k, m in mgs.items():
        np.testing.assert_array_equal(back[k].values, m.values)


def test_document_shape():
    F = random_filtration(0, 2)
    doc = json.loads(dump_exchange(F))
    assert set(doc) == {"probs", "levels", "martingales"}
    assert len(doc["levels"]) == F.depth + 1
    G, mgs = load_exchange(doc)
    assert G == F and mgs == {}
