"""Published ladders and constants the library is checked against."""

from __future__ import annotations

from .bounds import CombinationSpec

# ladders quoted with the published GL(2) constants
PUBLISHED_LADDERS: dict[str, tuple[float, ...]] = {
    "gl2-negative": (3, 5, 8, 17, 27, 38, 49, 61),
    "gl2-pair": (10, 23, 30, 36, 45, 54, 72, 81, 90),
    "maass-mod8": (19, 40, 69, 98, 127, 156, 185, 214, 243),
}

PUBLISHED_CONSTANTS: dict[str, float] = {
    "gl2-negative": 0.1118,
    "gl2-pair": 0.0414,
    "maass-mod8": 0.0156,
    "large-coefficient": 0.001355,
    "conjugates": 3.49e-4,
    "interval-root": 1.3371,
}

# argmax cutoffs quoted for the GL(n) constants
PUBLISHED_GLN_CUTOFFS: dict[str, float] = {"large-coefficient": 9.47, "conjugates": 18.0}


def published_spec(name: str) -> CombinationSpec:
    """The combination behind each published constant."""
    if name == "gl2-negative":
        return CombinationSpec(lambdas=(1.0,), twist_inequivalent=True)
    if name == "gl2-pair":
        return CombinationSpec(lambdas=(1.0, -1.0), twist_inequivalent=True)
    if name == "maass-mod8":
        return CombinationSpec(lambdas=(0.25,) * 4, twist_inequivalent=False)
    if name == "large-coefficient":
        return CombinationSpec(lambdas=(1.0,), dims=(3,), pole_orders=(3,))
    if name == "conjugates":
        return CombinationSpec(lambdas=(1.0,), dims=(4,), pole_orders=(7,))
    raise KeyError(name)
