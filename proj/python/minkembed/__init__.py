"""Isometric immersions into Minkowski space from gridded data.

Fields are numpy arrays of shape ``(*samples, *components)``; charts are
lists of ``(min, max, samples)`` tuples.
"""

from ._minkembed import (
    MinkembedError,
    __version__,
    align_manifold,
    christoffel,
    classical_gc_residual,
    fixture_names,
    flatness_residual,
    frame_compatibility_residual,
    generate,
    immerse_hypersurface_forms,
    immerse_manifold,
    lipschitz_constant,
    lorentz_decompose,
    lorentz_decompose_anchored,
    sobolev_gap,
)

__all__ = [
    "MinkembedError",
    "__version__",
    "align_manifold",
    "christoffel",
    "classical_gc_residual",
    "fixture_names",
    "flatness_residual",
    "frame_compatibility_residual",
    "generate",
    "immerse_hypersurface_forms",
    "immerse_manifold",
    "lipschitz_constant",
    "lorentz_decompose",
    "lorentz_decompose_anchored",
    "sobolev_gap",
]
