"""Wold decomposition and classification of the gallery pairs."""

from twistops.angles import SQRT2_MINUS_1
from twistops.classify import classify_pair
from twistops.gallery import build
from twistops.structured import wandering_spaces

for spec in ["toeplitz", "D:3", "F:2:1", "torus"]:
    fx = build(spec)
    W = wandering_spaces(fx.pair)
    dims = {"".join(map(str, sorted(A))) or "-": W[A].dim for A in W}
    got = classify_pair(fx.pair, SQRT2_MINUS_1)
    print(f"{spec:9s} wandering dims {dims}  ->  {got.type} {got.param_dict}  K = ({fx.expected_k[0]}, {fx.expected_k[1]})")
