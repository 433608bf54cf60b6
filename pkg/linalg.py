# ==============================================================================
# MODULE: LINALG - algèbre linéaire dense minimale (float64)
# ------------------------------------------------------------------------------
# Couche fine au-dessus de numpy utilisée par tous les modèles (ECNN, RNN, LSTM).
# Chaque opération vérifie les dimensions, ne modifie jamais ses entrées et
# renvoie un nouveau tableau.
#
# diag(u)·v n'est jamais matérialisée : c'est un produit de Hadamard, O(n).
# ==============================================================================

import numpy as np
from numpy.typing import ArrayLike, NDArray

from exceptions import DimensionError, NumericalError

Vector = NDArray[np.float64]
Matrix = NDArray[np.float64]


def as_vector(values: ArrayLike, name: str = "vecteur") -> Vector:
    """Convertit en vecteur float64 1-D, fini et non vide."""
    v = np.array(values, dtype=np.float64)
    if v.ndim != 1 or v.size < 1:
        raise DimensionError(f"{name} : vecteur 1-D non vide attendu, forme {v.shape}")
    if not np.all(np.isfinite(v)):
        raise NumericalError(f"{name} : valeurs non finies")
    return v


def as_matrix(values: ArrayLike, name: str = "matrice") -> Matrix:
    """Convertit en matrice float64 2-D (row-major), finie."""
    m = np.array(values, dtype=np.float64)
    if m.ndim != 2 or m.size < 1:
        raise DimensionError(f"{name} : matrice 2-D non vide attendue, forme {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NumericalError(f"{name} : valeurs non finies")
    return np.ascontiguousarray(m)


def _check_len(u: Vector, v: Vector, op: str):
    if u.ndim != 1 or v.ndim != 1 or u.shape[0] != v.shape[0]:
        raise DimensionError(f"{op} : longueurs incompatibles {u.shape} / {v.shape}")


def matvec(M: Matrix, v: Vector) -> Vector:
    """M·v."""
    if M.ndim != 2 or v.ndim != 1 or M.shape[1] != v.shape[0]:
        raise DimensionError(f"matvec : {M.shape} · {v.shape}")
    return M @ v


def transpose_matvec(M: Matrix, v: Vector) -> Vector:
    """Mᵀ·v sans transposer explicitement M."""
    if M.ndim != 2 or v.ndim != 1 or M.shape[0] != v.shape[0]:
        raise DimensionError(f"transpose_matvec : {M.shape}ᵀ · {v.shape}")
    return v @ M


def diag_apply(u: Vector, v: Vector) -> Vector:
    """diag(u)·v, soit le produit de Hadamard u ⊙ v."""
    _check_len(u, v, "diag_apply")
    return u * v


_TANH_BOUND = np.nextafter(1.0, 0.0)


def tanh_map(v: Vector) -> Vector:
    # tanh(x) arrondit à ±1.0 pour |x| > 19 : on garde la sortie dans (−1, 1)
    return np.clip(np.tanh(v), -_TANH_BOUND, _TANH_BOUND)


def outer(u: Vector, v: Vector) -> Matrix:
    if u.ndim != 1 or v.ndim != 1:
        raise DimensionError(f"outer : vecteurs attendus, formes {u.shape} / {v.shape}")
    return np.outer(u, v)


def axpy(a: float, x: NDArray[np.float64], y: NDArray[np.float64]) -> NDArray[np.float64]:
    """a·x + y (vecteurs ou matrices de même forme)."""
    if x.shape != y.shape:
        raise DimensionError(f"axpy : formes {x.shape} / {y.shape}")
    return a * x + y


def one_minus_squared(q: Vector) -> Vector:
    """1 − q̃, q̃ étant le vecteur des composantes de q au carré."""
    return 1.0 - q * q
