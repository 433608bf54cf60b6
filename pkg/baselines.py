# ==============================================================================
# MODULE: BASELINES - RNN simple et LSTM (passes avant + BPTT codées à la main)
# ------------------------------------------------------------------------------
# RNN simple :  s(t) = tanh(A·s(t−1) + B·x(t−1)) ;  y(t) = C·s(t)
#   f = tanh et g = identité, comme l'ECNN : avec D = 0 les deux modèles
#   coïncident, ce qui sert d'oracle croisé dans les tests.
#
# LSTM mono-couche standard, portes sigmoïdes, lecture linéaire y = C·h :
#   v = [h(t−1) ; x(t−1)]
#   i = σ(W_i v + b_i)   f = σ(W_f v + b_f)   o = σ(W_o v + b_o)
#   g = tanh(W_g v + b_g)
#   c(t) = f ⊙ c(t−1) + i ⊙ g ;  h(t) = o ⊙ tanh(c(t))
#
# Même perte que l'ECNN : (1/T)·Σ ½‖y(t) − y_d(t)‖².
# ==============================================================================

from dataclasses import dataclass, field

import numpy as np

from ecnn import _as_sequence
from exceptions import DimensionError, NumericalError
from linalg import (
    Matrix, Vector, as_matrix, as_vector, diag_apply, matvec,
    one_minus_squared, outer, tanh_map, transpose_matvec,
)


def _sigmoid(v: Vector) -> Vector:
    return 0.5 * (1.0 + np.tanh(0.5 * v))


def _check_sequences(X: Matrix, Y: Matrix, op: str):
    if X.shape[0] != Y.shape[0] or X.shape[0] < 1:
        raise DimensionError(f"{op} : {X.shape[0]} entrées pour {Y.shape[0]} cibles")


# ==============================================================================
# RNN SIMPLE
# ==============================================================================

@dataclass(frozen=True)
class RnnParams:
    A: Matrix  # n×n
    B: Matrix  # n×m
    C: Matrix  # p×n

    def __post_init__(self):
        n, m, p = self.A.shape[0], self.B.shape[1], self.C.shape[0]
        for name, shape in {"A": (n, n), "B": (n, m), "C": (p, n)}.items():
            if getattr(self, name).shape != shape:
                raise DimensionError(f"RnnParams.{name} : forme {getattr(self, name).shape}, attendu {shape}")

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
        return {"A": self.A, "B": self.B, "C": self.C}

    @classmethod
    def from_tensors(cls, A, B, C) -> "RnnParams":
        return cls(A=as_matrix(A, "A"), B=as_matrix(B, "B"), C=as_matrix(C, "C"))


@dataclass
class RnnTrace:
    params: RnnParams
    states: list = field(default_factory=list)   # s(0..T)
    outputs: list = field(default_factory=list)  # y(1..T)

    @property
    def steps(self) -> int:
        return len(self.outputs)

    def final_state(self) -> tuple:
        return (self.states[-1],)


@dataclass(frozen=True)
class RnnGradients:
    dA: Matrix
    dB: Matrix
    dC: Matrix

    def tensors(self) -> dict:
        return {"A": self.dA, "B": self.dB, "C": self.dC}


def init_rnn_params(n: int, m: int, p: int, seed: int) -> RnnParams:
    if min(n, m, p) < 1:
        raise DimensionError(f"init_rnn_params : dimensions nulles (n={n}, m={m}, p={p})")
    rng = np.random.default_rng(seed)
    bound = 1.0 / np.sqrt(n)
    return RnnParams(
        A=rng.uniform(-bound, bound, size=(n, n)),
        B=rng.uniform(-bound, bound, size=(n, m)),
        C=rng.uniform(-bound, bound, size=(p, n)),
    )


def rnn_forward(params: RnnParams, inputs, targets, s0=None):
    X = _as_sequence(inputs, params.m, "inputs")
    Y = _as_sequence(targets, params.p, "targets")
    _check_sequences(X, Y, "rnn_forward")

    s = np.zeros(params.n) if s0 is None else as_vector(s0, "s0")
    if s.shape[0] != params.n:
        raise DimensionError("rnn_forward : état initial de mauvaise taille")

    trace = RnnTrace(params=params, states=[s])
    total = 0.0
    for t in range(X.shape[0]):
        s = tanh_map(matvec(params.A, s) + matvec(params.B, X[t]))
        y = matvec(params.C, s)
        e = y - Y[t]
        trace.states.append(s)
        trace.outputs.append(y)
        total += 0.5 * float(e @ e)

    loss = total / X.shape[0]
    if not np.isfinite(loss):
        raise NumericalError("rnn_forward : perte non finie")
    return trace, loss


def rnn_bptt(params: RnnParams, trace: RnnTrace, inputs, targets) -> RnnGradients:
    X = _as_sequence(inputs, params.m, "inputs")
    Y = _as_sequence(targets, params.p, "targets")
    _check_sequences(X, Y, "rnn_bptt")
    T = X.shape[0]
    if trace.steps != T:
        raise DimensionError(f"rnn_bptt : trace de {trace.steps} pas pour {T} entrées")
    for name, value in params.tensors().items():
        if not np.array_equal(trace.params.tensors()[name], value):
            raise DimensionError(f"rnn_bptt : trace périmée (paramètre {name} modifié)")

    dA = np.zeros_like(params.A)
    dB = np.zeros_like(params.B)
    dC = np.zeros_like(params.C)
    delta_next = np.zeros(params.n)

    for t in range(T, 0, -1):
        s_t = trace.states[t]
        grad_y = (trace.outputs[t - 1] - Y[t - 1]) / T
        grad_s = transpose_matvec(params.C, grad_y) + transpose_matvec(params.A, delta_next)
        delta = diag_apply(one_minus_squared(s_t), grad_s)

        dA += outer(delta, trace.states[t - 1])
        dB += outer(delta, X[t - 1])
        dC += outer(grad_y, s_t)
        delta_next = delta

    return RnnGradients(dA=dA, dB=dB, dC=dC)


def rnn_forecast(params: RnnParams, warmup_inputs, warmup_targets, future_inputs) -> np.ndarray:
    trace, _ = rnn_forward(params, warmup_inputs, warmup_targets)
    future = np.array(future_inputs, dtype=np.float64)
    if future.size == 0:
        return np.empty((0, params.p))
    future = _as_sequence(future, params.m, "future_inputs")

    s = trace.states[-1]
    predictions = []
    for x in future:
        s = tanh_map(matvec(params.A, s) + matvec(params.B, x))
        predictions.append(matvec(params.C, s))
    return np.vstack(predictions)


# ==============================================================================
# LSTM
# ==============================================================================

GATES = ("i", "f", "o", "g")


@dataclass(frozen=True)
class LstmParams:
    W_i: Matrix  # n×(n+m), entrée v = [h ; x]
    W_f: Matrix
    W_o: Matrix
    W_g: Matrix
    b_i: Vector  # n
    b_f: Vector
    b_o: Vector
    b_g: Vector
    C: Matrix    # p×n

    def __post_init__(self):
        n = self.W_i.shape[0]
        width = self.W_i.shape[1]
        if width <= n:
            raise DimensionError(f"LstmParams : largeur {width} ≤ n={n}")
        for gate in GATES:
            if getattr(self, f"W_{gate}").shape != (n, width):
                raise DimensionError(f"LstmParams.W_{gate} : forme {getattr(self, f'W_{gate}').shape}")
            if getattr(self, f"b_{gate}").shape != (n,):
                raise DimensionError(f"LstmParams.b_{gate} : forme {getattr(self, f'b_{gate}').shape}")
        if self.C.ndim != 2 or self.C.shape[1] != n:
            raise DimensionError(f"LstmParams.C : forme {self.C.shape}")

    @property
    def n(self) -> int:
        return self.W_i.shape[0]

    @property
    def m(self) -> int:
        return self.W_i.shape[1] - self.n

    @property
    def p(self) -> int:
        return self.C.shape[0]

    def tensors(self) -> dict:
        names = [f"W_{g}" for g in GATES] + [f"b_{g}" for g in GATES] + ["C"]
        return {name: getattr(self, name) for name in names}

    @classmethod
    def from_tensors(cls, **tensors) -> "LstmParams":
        converted = {}
        for name, value in tensors.items():
            converted[name] = as_vector(value, name) if name.startswith("b_") else as_matrix(value, name)
        return cls(**converted)


@dataclass
class LstmTrace:
    params: LstmParams
    hidden: list = field(default_factory=list)  # h(0..T)
    cells: list = field(default_factory=list)   # c(0..T)
    gates: list = field(default_factory=list)   # (v, i, f, o, g, tanh c) pour t = 1..T
    outputs: list = field(default_factory=list)

    @property
    def steps(self) -> int:
        return len(self.outputs)

    def final_state(self) -> tuple:
        return self.hidden[-1], self.cells[-1]


@dataclass(frozen=True)
class LstmGradients:
    grads: dict

    def tensors(self) -> dict:
        return dict(self.grads)


def init_lstm_params(n: int, m: int, p: int, seed: int) -> LstmParams:
    """Poids uniformes ±1/√n, biais nuls sauf la porte d'oubli initialisée à 1."""
    if min(n, m, p) < 1:
        raise DimensionError(f"init_lstm_params : dimensions nulles (n={n}, m={m}, p={p})")
    rng = np.random.default_rng(seed)
    bound = 1.0 / np.sqrt(n)
    weights = {f"W_{g}": rng.uniform(-bound, bound, size=(n, n + m)) for g in GATES}
    biases = {f"b_{g}": np.zeros(n) for g in GATES}
    biases["b_f"] = np.ones(n)
    return LstmParams(**weights, **biases, C=rng.uniform(-bound, bound, size=(p, n)))


def _lstm_cell(params: LstmParams, h_prev: Vector, c_prev: Vector, x: Vector):
    v = np.concatenate([h_prev, x])
    i = _sigmoid(matvec(params.W_i, v) + params.b_i)
    f = _sigmoid(matvec(params.W_f, v) + params.b_f)
    o = _sigmoid(matvec(params.W_o, v) + params.b_o)
    g = tanh_map(matvec(params.W_g, v) + params.b_g)
    c = diag_apply(f, c_prev) + diag_apply(i, g)
    tanh_c = tanh_map(c)
    h = diag_apply(o, tanh_c)
    return h, c, (v, i, f, o, g, tanh_c)


def lstm_forward(params: LstmParams, inputs, targets, h0=None, c0=None):
    X = _as_sequence(inputs, params.m, "inputs")
    Y = _as_sequence(targets, params.p, "targets")
    _check_sequences(X, Y, "lstm_forward")

    h = np.zeros(params.n) if h0 is None else as_vector(h0, "h0")
    c = np.zeros(params.n) if c0 is None else as_vector(c0, "c0")
    if h.shape[0] != params.n or c.shape[0] != params.n:
        raise DimensionError("lstm_forward : état initial de mauvaise taille")

    trace = LstmTrace(params=params, hidden=[h], cells=[c])
    total = 0.0
    for t in range(X.shape[0]):
        h, c, cache = _lstm_cell(params, h, c, X[t])
        y = matvec(params.C, h)
        e = y - Y[t]
        trace.hidden.append(h)
        trace.cells.append(c)
        trace.gates.append(cache)
        trace.outputs.append(y)
        total += 0.5 * float(e @ e)

    loss = total / X.shape[0]
    if not np.isfinite(loss):
        raise NumericalError("lstm_forward : perte non finie")
    return trace, loss


def lstm_bptt(params: LstmParams, trace: LstmTrace, inputs, targets) -> LstmGradients:
    X = _as_sequence(inputs, params.m, "inputs")
    Y = _as_sequence(targets, params.p, "targets")
    _check_sequences(X, Y, "lstm_bptt")
    T = X.shape[0]
    if trace.steps != T:
        raise DimensionError(f"lstm_bptt : trace de {trace.steps} pas pour {T} entrées")
    for name, value in params.tensors().items():
        if not np.array_equal(trace.params.tensors()[name], value):
            raise DimensionError(f"lstm_bptt : trace périmée (paramètre {name} modifié)")

    n = params.n
    grads = {name: np.zeros_like(value) for name, value in params.tensors().items()}
    dh_next = np.zeros(n)
    dc_next = np.zeros(n)

    for t in range(T, 0, -1):
        v, i, f, o, g, tanh_c = trace.gates[t - 1]
        c_prev = trace.cells[t - 1]
        grad_y = (trace.outputs[t - 1] - Y[t - 1]) / T
        grads["C"] += outer(grad_y, trace.hidden[t])

        dh = transpose_matvec(params.C, grad_y) + dh_next
        dc = diag_apply(diag_apply(dh, o), one_minus_squared(tanh_c)) + dc_next

        pre = {
            "i": diag_apply(dc * g, i * (1.0 - i)),
            "f": diag_apply(dc * c_prev, f * (1.0 - f)),
            "o": diag_apply(dh * tanh_c, o * (1.0 - o)),
            "g": diag_apply(dc * i, one_minus_squared(g)),
        }
        dv = np.zeros_like(v)
        for gate, d_pre in pre.items():
            grads[f"W_{gate}"] += outer(d_pre, v)
            grads[f"b_{gate}"] += d_pre
            dv += transpose_matvec(getattr(params, f"W_{gate}"), d_pre)

        dh_next = dv[:n]
        dc_next = diag_apply(dc, f)

    return LstmGradients(grads=grads)


def lstm_forecast(params: LstmParams, warmup_inputs, warmup_targets, future_inputs) -> np.ndarray:
    trace, _ = lstm_forward(params, warmup_inputs, warmup_targets)
    future = np.array(future_inputs, dtype=np.float64)
    if future.size == 0:
        return np.empty((0, params.p))
    future = _as_sequence(future, params.m, "future_inputs")

    h, c = trace.final_state()
    predictions = []
    for x in future:
        h, c, _ = _lstm_cell(params, h, c, x)
        predictions.append(matvec(params.C, h))
    return np.vstack(predictions)
