"""Splitting a pair twisted by a unitary U along the spectrum of U."""

import numpy as np

from twistops.angles import GOLDEN, SQRT2_MINUS_1
from twistops.classify import classify_U_twisted
from twistops.gallery import build
from twistops.spectral import spectral_projections
from twistops.structured import to_window

fx = build("U:D:1:sqrt2m1;toeplitz:golden")
result, info = classify_U_twisted(fx.pair, fx.twist, [SQRT2_MINUS_1, GOLDEN], return_details=True)
for angle, part in result.components:
    print(f"U = e^(2 pi i {angle}): type {part.type} {part.param_dict}")
print("reconstruction residual:", info["reconstruction_residual"])

U, _ = to_window(fx.twist, 3)
U = U.toarray()
proj = spectral_projections(U)
print("eigenvalue angles of a window of U:", [round(float(np.angle(lam) / (2 * np.pi)) % 1, 6) for lam, _ in proj])
