# ==============================================================================
# MODULE: ECNN - RÉSEAU DE NEURONES À CORRECTION D'ERREUR
# ------------------------------------------------------------------------------
# Dynamique (poids partagés A, B, C, D à chaque pas de temps) :
#
#   z(t) = y(t) − y_d(t)
#   s(t) = tanh( A·s(t−1) + B·x(t−1) + D·tanh(z(t−1)) )
#   y(t) = C·s(t)
#
# Perte d'une séquence : L = (1/T) · Σ_t ½‖y(t) − y_d(t)‖²
#
# La rétropropagation (BPTT) est codée à la main : un seul balayage arrière
# sur la trace mise en cache, mémoire O(T). Sa validité est vérifiée par
# différences finies centrées (gradient_checker.py).
#
# Conventions :
#   - s(0) = 0 et z(0) = 0 sauf état initial fourni (BPTT tronquée)
#   - en prévision, l'erreur future injectée est le vecteur nul
# ==============================================================================

import logging
from dataclasses import dataclass, field

import numpy as np

from exceptions import DimensionError, NumericalError
from linalg import (
    Matrix, Vector, as_matrix, as_vector, axpy, diag_apply, matvec,
    one_minus_squared, outer, tanh_map, transpose_matvec,
)


# ==============================================================================
# TYPES
# ==============================================================================

@dataclass(frozen=True)
class EcnnParams:
    """Les quatre matrices partagées de l'ECNN."""
    A: Matrix  # n×n  état → état
    B: Matrix  # n×m  entrée → état
    C: Matrix  # p×n  état → sortie
    D: Matrix  # n×p  erreur → état

    def __post_init__(self):
        n = self.A.shape[0]
        m = self.B.shape[1]
        p = self.C.shape[0]
        expected = {"A": (n, n), "B": (n, m), "C": (p, n), "D": (n, p)}
        for name, shape in expected.items():
            actual = getattr(self, name).shape
            if actual != shape:
                raise DimensionError(f"EcnnParams.{name} : forme {actual}, attendu {shape}")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def p(self) -> int:
        return self.C.shape[0]

    def tensors(self) -> dict:
        return {"A": self.A, "B": self.B, "C": self.C, "D": self.D}

    @classmethod
    def from_tensors(cls, A, B, C, D) -> "EcnnParams":
        return cls(
            A=as_matrix(A, "A"), B=as_matrix(B, "B"),
            C=as_matrix(C, "C"), D=as_matrix(D, "D"),
        )


@dataclass
class ForwardTrace:
    """Trace d'une passe avant, conservée pour la BPTT."""
    params: EcnnParams
    states: list = field(default_factory=list)          # s(0..T)
    outputs: list = field(default_factory=list)         # y(1..T)
    errors: list = field(default_factory=list)          # z(0..T)
    preactivations: list = field(default_factory=list)  # arguments du tanh, t = 1..T

    @property
    def steps(self) -> int:
        return len(self.outputs)

    def final_state(self) -> tuple:
        """(s(T), z(T)) : état initial d'une éventuelle fenêtre suivante."""
        return self.states[-1], self.errors[-1]


@dataclass(frozen=True)
class EcnnGradients:
    dA: Matrix
    dB: Matrix
    dC: Matrix
    dD: Matrix

    def tensors(self) -> dict:
        return {"A": self.dA, "B": self.dB, "C": self.dC, "D": self.dD}


# ==============================================================================
# INITIALISATION
# ==============================================================================

def init_params(n: int, m: int, p: int, seed: int) -> EcnnParams:
    """Tirage uniforme dans [−1/√n, 1/√n], déterministe pour une graine donnée."""
    if min(n, m, p) < 1:
        raise DimensionError(f"init_params : dimensions nulles (n={n}, m={m}, p={p})")
    rng = np.random.default_rng(seed)
    bound = 1.0 / np.sqrt(n)
    return EcnnParams(
        A=rng.uniform(-bound, bound, size=(n, n)),
        B=rng.uniform(-bound, bound, size=(n, m)),
        C=rng.uniform(-bound, bound, size=(p, n)),
        D=rng.uniform(-bound, bound, size=(n, p)),
    )


# ==============================================================================
# PASSE AVANT
# ==============================================================================

def _step(params: EcnnParams, s_prev: Vector, x_prev: Vector, z_prev: Vector):
    a = matvec(params.A, s_prev) + matvec(params.B, x_prev) + matvec(params.D, tanh_map(z_prev))
    s = tanh_map(a)
    y = matvec(params.C, s)
    return a, s, y


def forward_step(params: EcnnParams, s_prev, x_prev, z_prev, y_target=None):
    """Un pas de l'ECNN. Sans cible (prévision), z vaut le vecteur nul."""
    s_prev = as_vector(s_prev, "s_prev")
    x_prev = as_vector(x_prev, "x_prev")
    z_prev = as_vector(z_prev, "z_prev")
    if s_prev.shape[0] != params.n or x_prev.shape[0] != params.m or z_prev.shape[0] != params.p:
        raise DimensionError(
            f"forward_step : s={s_prev.shape[0]}, x={x_prev.shape[0]}, z={z_prev.shape[0]} "
            f"pour n={params.n}, m={params.m}, p={params.p}"
        )

    _, s, y = _step(params, s_prev, x_prev, z_prev)
    if y_target is None:
        z = np.zeros(params.p)
    else:
        y_target = as_vector(y_target, "y_target")
        if y_target.shape[0] != params.p:
            raise DimensionError(f"forward_step : cible de taille {y_target.shape[0]}, attendu {params.p}")
        z = y - y_target
    return s, y, z


def _as_sequence(values, width: int, name: str) -> Matrix:
    seq = np.array(values, dtype=np.float64)
    if seq.ndim == 1:
        seq = seq.reshape(-1, 1) if width == 1 else seq.reshape(1, -1)
    if seq.ndim != 2 or seq.shape[1] != width:
        raise DimensionError(f"{name} : forme {seq.shape}, largeur attendue {width}")
    if not np.all(np.isfinite(seq)):
        raise NumericalError(f"{name} : valeurs non finies")
    return seq


def forward_sequence(params: EcnnParams, inputs, targets, s0=None, z0=None):
    """
    Déroule l'ECNN sur x(0..T−1) et compare y(t) à y_d(t), t = 1..T.

    Retourne (trace, perte) avec perte = (1/T)·Σ ½‖y(t) − y_d(t)‖².
    """
    X = _as_sequence(inputs, params.m, "inputs")
    Y = _as_sequence(targets, params.p, "targets")
    if X.shape[0] != Y.shape[0] or X.shape[0] < 1:
        raise DimensionError(f"forward_sequence : {X.shape[0]} entrées pour {Y.shape[0]} cibles")

    s = np.zeros(params.n) if s0 is None else as_vector(s0, "s0")
    z = np.zeros(params.p) if z0 is None else as_vector(z0, "z0")
    if s.shape[0] != params.n or z.shape[0] != params.p:
        raise DimensionError("forward_sequence : état initial de mauvaise taille")

    trace = ForwardTrace(params=params, states=[s], errors=[z])
    total = 0.0
    for t in range(X.shape[0]):
        a, s, y = _step(params, s, X[t], z)
        z = y - Y[t]
        trace.preactivations.append(a)
        trace.states.append(s)
        trace.outputs.append(y)
        trace.errors.append(z)
        total += 0.5 * float(z @ z)

    loss = total / X.shape[0]
    if not np.isfinite(loss):
        raise NumericalError("forward_sequence : perte non finie")
    return trace, loss


# ==============================================================================
# RÉTROPROPAGATION DANS LE TEMPS
# ==============================================================================

def _check_trace(params: EcnnParams, trace: ForwardTrace, steps: int):
    if trace.steps != steps or len(trace.states) != steps + 1 or len(trace.errors) != steps + 1:
        raise DimensionError(f"bptt_gradients : trace de {trace.steps} pas pour {steps} entrées")
    own = trace.params.tensors()
    for name, value in params.tensors().items():
        if own[name] is not value and not np.array_equal(own[name], value):
            raise DimensionError(f"bptt_gradients : trace périmée (paramètre {name} modifié)")


def bptt_gradients(params: EcnnParams, trace: ForwardTrace, inputs, targets) -> EcnnGradients:
    """
    Gradients de la perte de forward_sequence par rapport à A, B, C, D.

    Récurrence arrière (δ(t) = gradient par rapport à l'argument du tanh) :
      g_z(t) = ∇_y L(t) + diag(1 − tanh²(z(t))) · Dᵀ δ(t+1)
      g_s(t) = Cᵀ g_z(t) + Aᵀ δ(t+1)
      δ(t)   = diag(1 − s̃(t)) · g_s(t)
    z(t) = C·s(t) − y_d(t) : le terme de rétroaction de l'erreur passe par g_z,
    d'où ∇_C = Σ g_z(t)·s(t)ᵀ qui contient les deux chemins de C.
    """
    X = _as_sequence(inputs, params.m, "inputs")
    Y = _as_sequence(targets, params.p, "targets")
    if X.shape[0] != Y.shape[0]:
        raise DimensionError(f"bptt_gradients : {X.shape[0]} entrées pour {Y.shape[0]} cibles")
    T = X.shape[0]
    _check_trace(params, trace, T)

    dA = np.zeros_like(params.A)
    dB = np.zeros_like(params.B)
    dC = np.zeros_like(params.C)
    dD = np.zeros_like(params.D)
    delta_next = np.zeros(params.n)

    for t in range(T, 0, -1):
        s_t = trace.states[t]
        s_prev = trace.states[t - 1]
        z_t = trace.errors[t]
        grad_y = (trace.outputs[t - 1] - Y[t - 1]) / T

        # z(t) alimente s(t+1) via D·tanh(z(t)) ; nul au dernier pas
        grad_z = axpy(1.0, diag_apply(one_minus_squared(tanh_map(z_t)),
                                      transpose_matvec(params.D, delta_next)), grad_y)
        grad_s = transpose_matvec(params.C, grad_z) + transpose_matvec(params.A, delta_next)
        delta = diag_apply(one_minus_squared(s_t), grad_s)

        dA += outer(delta, s_prev)
        dB += outer(delta, X[t - 1])
        dD += outer(delta, tanh_map(trace.errors[t - 1]))
        dC += outer(grad_z, s_t)
        delta_next = delta

    return EcnnGradients(dA=dA, dB=dB, dC=dC, dD=dD)


# ==============================================================================
# PRÉVISION
# ==============================================================================

def forecast(params: EcnnParams, warmup_inputs, warmup_targets, future_inputs) -> np.ndarray:
    """
    Chauffe l'état sur une période où les cibles sont connues (erreurs réelles
    réinjectées), puis avance sur les entrées futures avec z = 0.
    """
    trace, _ = forward_sequence(params, warmup_inputs, warmup_targets)
    future = np.array(future_inputs, dtype=np.float64)
    if future.size == 0:
        return np.empty((0, params.p))
    future = _as_sequence(future, params.m, "future_inputs")

    s, z = trace.final_state()
    predictions = []
    for x in future:
        s, y, z = forward_step(params, s, x, z)
        predictions.append(y)
    logging.debug(f"🔮 ECNN : {len(predictions)} pas prévus après {trace.steps} pas de chauffe")
    return np.vstack(predictions)
