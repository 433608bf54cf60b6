# ==============================================================================
# MODULE: GRADIENT CHECKER - vérification des gradients par différences finies
# ------------------------------------------------------------------------------
# Dérivée numérique centrée : (L(w + h) − L(w − h)) / 2h, h = 1e−6.
# Une composante passe si son erreur relative ≤ tol OU si son écart absolu
# ≤ tol × 1e−3 (plancher absolu : 1e−8 pour tol = 1e−5).
# L'erreur rapportée par tenseur est le maximum de min(rel, abs / 1e−3),
# de sorte que le test passe exactement quand ce maximum est ≤ tol.
# ==============================================================================

import logging
from dataclasses import dataclass, field

import numpy as np

from exceptions import ConfigError, NumericalError
from model_registry import ModelKind, get_model_kind

STEP = 1e-6
ABS_FLOOR_RATIO = 1e-3
MAX_DIM = 10


@dataclass
class GradCheckReport:
    kind: str
    tolerance: float
    max_error: dict = field(default_factory=dict)   # tenseur -> erreur max sur tous les essais
    failures: list = field(default_factory=list)    # tenseurs en échec
    trials: int = 0

    @property
    def passed(self) -> bool:
        return not self.failures

    def lines(self) -> list:
        out = [f"Vérification des gradients : {self.kind} ({self.trials} essai(s), tol={self.tolerance:g})"]
        for name, err in self.max_error.items():
            flag = "ÉCHEC" if name in self.failures else "ok"
            out.append(f"  {name:<4} erreur relative max = {err:.3e}  [{flag}]")
        out.append("RÉSULTAT : " + ("PASS" if self.passed else f"FAIL ({', '.join(self.failures)})"))
        return out


def numeric_gradients(kind: ModelKind, params, inputs, targets, h: float = STEP) -> dict:
    """Gradient de la perte de séquence par différences centrées, tenseur par tenseur."""
    tensors = {name: np.array(t, dtype=np.float64) for name, t in params.tensors().items()}
    grads = {}
    for name, tensor in tensors.items():
        grad = np.zeros_like(tensor)
        for idx in np.ndindex(tensor.shape):
            original = tensor[idx]
            tensor[idx] = original + h
            _, loss_plus = kind.run(kind.build(tensors), inputs, targets)
            tensor[idx] = original - h
            _, loss_minus = kind.run(kind.build(tensors), inputs, targets)
            tensor[idx] = original
            grad[idx] = (loss_plus - loss_minus) / (2.0 * h)
        grads[name] = grad
    return grads


def gradient_errors(analytic: np.ndarray, numeric: np.ndarray) -> np.ndarray:
    """min(erreur relative, écart absolu / ABS_FLOOR_RATIO) composante par composante."""
    diff = np.abs(analytic - numeric)
    scale = np.maximum(np.abs(analytic), np.abs(numeric))
    rel = np.divide(diff, scale, out=np.zeros_like(diff), where=scale > 0)
    return np.minimum(rel, diff / ABS_FLOOR_RATIO)


def check_once(kind: ModelKind, params, inputs, targets, corrupt: str = None) -> dict:
    """Erreur max par tenseur pour une configuration."""
    trace, loss = kind.run(params, inputs, targets)
    if not np.isfinite(loss):
        raise NumericalError("Passe avant non finie pendant la vérification")
    analytic = kind.backward(params, trace, inputs, targets).tensors()
    if corrupt is not None:
        if corrupt not in analytic:
            raise ConfigError(f"Tenseur inconnu pour --corrupt : {corrupt} (choix : {', '.join(analytic)})")
        analytic[corrupt] = analytic[corrupt] + 1e-2 * (1.0 + np.abs(analytic[corrupt]))
    numeric = numeric_gradients(kind, params, inputs, targets)
    return {name: float(np.max(gradient_errors(analytic[name], numeric[name]))) for name in analytic}


def random_problem(kind: ModelKind, n: int, m: int, p: int, T: int, seed: int) -> tuple:
    rng = np.random.default_rng(seed)
    params = kind.init(n, m, p, seed)
    inputs = rng.uniform(-1.0, 1.0, size=(T, m))
    targets = rng.uniform(-1.0, 1.0, size=(T, p))
    return params, inputs, targets


def run_gradcheck(kind_name: str, n: int = 4, m: int = 3, p: int = 2, T: int = 5, trials: int = 1,
                  tolerance: float = 1e-5, seed: int = 0, corrupt: str = None,
                  random_dims: bool = False) -> GradCheckReport:
    """
    Suite de différences finies. `random_dims` tire (n, m, p) ≤ 5 et T ≤ 8 à
    chaque essai ; sinon les dimensions données servent à tous les essais.
    """
    if max(n, m, p) > MAX_DIM or min(n, m, p, T) < 1:
        raise ConfigError(f"Dimensions hors de [1, {MAX_DIM}] pour la vérification : n={n}, m={m}, p={p}, T={T}")
    if trials < 1:
        raise ConfigError(f"trials={trials} < 1")
    kind = get_model_kind(kind_name)
    report = GradCheckReport(kind=kind.name, tolerance=tolerance, trials=trials)
    rng = np.random.default_rng(seed)

    for trial in range(trials):
        dims = (n, m, p, T)
        if random_dims:
            dims = tuple(int(v) for v in rng.integers(1, [6, 6, 6, 9]))
        errors = check_once(kind, *random_problem(kind, *dims, seed + trial), corrupt=corrupt)
        for name, err in errors.items():
            report.max_error[name] = max(report.max_error.get(name, 0.0), err)
        logging.debug(f"   essai {trial} dims={dims} : " + ", ".join(f"{k}={v:.2e}" for k, v in errors.items()))

    report.failures = [name for name, err in report.max_error.items() if not err <= tolerance]
    for line in report.lines():
        (logging.info if report.passed else logging.error)(line)
    return report
