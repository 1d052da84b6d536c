"""Lax matrices, Poisson brackets and elliptic factorizations.

Models are plain dicts in the JSON schema of the ``laxkit`` command-line tool: complex numbers
are ``[re, im]`` pairs, matrices are row-major and every model carries a ``"type"`` tag.
"""

from __future__ import annotations

import json
from typing import Any, Mapping

import numpy as np

from . import _core
from ._core import LaxkitError, phi, sigma, suite_names, theta, weierstrass_zeta

__version__ = _core.__version__

__all__ = [
    "LaxkitError",
    "det_zeros",
    "eval",
    "factor",
    "load",
    "phi",
    "save",
    "sigma",
    "sklyanin_bracket_matrix",
    "sklyanin_jacobi_residual",
    "suite_names",
    "theta",
    "validate",
    "verify",
    "weierstrass_zeta",
]


def _dump(model: Mapping[str, Any]) -> str:
    return json.dumps(model)


def validate(model: Mapping[str, Any]) -> dict:
    """Parse and validate a model; returns it in canonical form."""
    return json.loads(_core.validate_model(_dump(model)))


def load(path: str) -> dict:
    """Read and validate a model file."""
    with open(path, encoding="utf-8") as f:
        return validate(json.load(f))


def save(model: Mapping[str, Any], path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(model, f, indent=2)
        f.write("\n")


def eval(model: Mapping[str, Any], z: complex) -> np.ndarray:  # noqa: A001
    """L(z) as a complex matrix; a chain evaluates to the product of its factors."""
    return _core.eval(_dump(model), complex(z))


def det_zeros(model: Mapping[str, Any]) -> np.ndarray:
    """Zeros of det L: the finite plane for rational models, one period cell for elliptic ones."""
    return np.array(_core.det_zeros(_dump(model)), dtype=complex)


def factor(model: Mapping[str, Any], pairing: str = "canonical", u1: complex | None = None) -> dict:
    """Multiplicative form of a rational_additive or multipole_sklyanin model.

    The result carries ``reconstruction_residual`` and, for elliptic input, the zero data used.
    ``pairing`` is ``"canonical"`` or ``"perm:i,j,..."``.
    """
    text, residual, tolerance = _core.factor(_dump(model), pairing, None if u1 is None else complex(u1))
    out = json.loads(text)
    out["tolerance"] = tolerance
    out["passed"] = residual < tolerance
    return out


def sklyanin_bracket_matrix(n: int, tau: complex, x) -> tuple[list[str], np.ndarray]:
    """Coordinate names (u, s0..s3) and Poisson matrix of the order-n Sklyanin bracket, n = 1, 2, 3."""
    return _core.sklyanin_bracket_matrix(n, complex(tau), np.asarray(x, dtype=complex))


def sklyanin_jacobi_residual(n: int, tau: complex, x) -> float:
    return _core.sklyanin_jacobi_residual(n, complex(tau), np.asarray(x, dtype=complex))


def verify(
    suite: str,
    seed: int = 42,
    tau: complex | None = None,
    samples: int | None = None,
    tol: Mapping[str, float] | None = None,
) -> dict:
    """Run a verification suite; returns the JSON report as a dict."""
    return json.loads(
        _core.verify(suite, seed, None if tau is None else complex(tau), samples, dict(tol or {}))
    )
