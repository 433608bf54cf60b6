# ==============================================================================
# MODULE: TRAINER - perte MSE, optimiseurs SGD/Adam et boucle d'entraînement
# ------------------------------------------------------------------------------
# Perte d'un ensemble de fenêtres : (1/(2K))·Σ (ŷ_d − ŷ)², K = nombre de
# couples (fenêtre, pas) qui contribuent.
#
# Boucle : époques × mini-lots mélangés par un générateur graine ; gradient
# d'un lot = moyenne des gradients par fenêtre ; BPTT tronquée sur les k
# derniers pas de chaque fenêtre (les N−k premiers ne font que chauffer
# l'état). Les paramètres retenus sont ceux de la meilleure époque en
# validation.
# ==============================================================================

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from exceptions import ConfigError, DataError, DimensionError, NumericalError

OPTIMIZERS = ("sgd", "adam")


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 1000
    batch_size: int = 64
    window: int = 7
    learning_rate: float = 1e-3
    truncation: Optional[int] = None  # k ; None → k = N
    seed: int = 42
    optimizer: str = "adam"
    log_every: int = 100

    def __post_init__(self):
        if self.epochs < 0:
            raise ConfigError(f"epochs={self.epochs} < 0")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size={self.batch_size} < 1")
        if self.window < 1:
            raise ConfigError(f"window={self.window} < 1")
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate={self.learning_rate} doit être > 0")
        if self.truncation is not None and not 1 <= self.truncation <= self.window:
            raise ConfigError(f"truncation={self.truncation} hors de [1, {self.window}]")
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(f"Optimiseur inconnu '{self.optimizer}' (choix : {', '.join(OPTIMIZERS)})")

    @property
    def k(self) -> int:
        return self.window if self.truncation is None else self.truncation


@dataclass(frozen=True)
class AdamState:
    m: dict
    v: dict
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def fresh(cls, params) -> "AdamState":
        tensors = _tensors(params)
        return cls(
            m={name: np.zeros_like(t) for name, t in tensors.items()},
            v={name: np.zeros_like(t) for name, t in tensors.items()},
        )


@dataclass
class TrainReport:
    train_loss: list = field(default_factory=list)
    val_loss: list = field(default_factory=list)
    best_epoch: Optional[int] = None
    params: object = None
    initial_loss: float = float("nan")

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "epoch": np.arange(len(self.train_loss), dtype=int),
            "train_loss": np.asarray(self.train_loss, dtype=np.float64),
            "val_loss": np.asarray(self.val_loss, dtype=np.float64),
        })

    def to_csv(self, path) -> Path:
        path = Path(path)
        self.to_frame().to_csv(path, index=False, float_format="%.17g")
        return path


# ==============================================================================
# PERTE ET OPTIMISEURS
# ==============================================================================

def mse_loss(predictions, targets, K: int) -> float:
    predictions = np.asarray(predictions, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if K <= 0:
        raise DataError("mse_loss : aucun exemple contributif (K=0)")
    if predictions.shape != targets.shape:
        raise DimensionError(f"mse_loss : formes {predictions.shape} et {targets.shape}")
    diff = targets - predictions
    return float(np.sum(diff * diff) / (2.0 * K))


def _tensors(obj) -> dict:
    return obj if isinstance(obj, dict) else obj.tensors()


def _rebuild(params, tensors: dict):
    return tensors if isinstance(params, dict) else replace(params, **tensors)


def _check_shapes(params: dict, grads: dict, op: str):
    if params.keys() != grads.keys():
        raise DimensionError(f"{op} : tenseurs {sorted(grads)} pour {sorted(params)}")
    for name, value in params.items():
        if np.shape(grads[name]) != np.shape(value):
            raise DimensionError(f"{op} : gradient {name} de forme {np.shape(grads[name])}, attendu {np.shape(value)}")


def sgd_step(params, gradients, learning_rate: float):
    """W ← W − η·∇W pour chaque tenseur."""
    tensors, grads = _tensors(params), _tensors(gradients)
    _check_shapes(tensors, grads, "sgd_step")
    return _rebuild(params, {name: value - learning_rate * grads[name] for name, value in tensors.items()})


def adam_step(params, gradients, state: AdamState, learning_rate: float):
    """Mise à jour Adam avec correction de biais ; renvoie (params, nouvel état)."""
    tensors, grads = _tensors(params), _tensors(gradients)
    _check_shapes(tensors, grads, "adam_step")
    _check_shapes(tensors, state.m, "adam_step (m)")

    step = state.step + 1
    bc1 = 1.0 - state.beta1 ** step
    bc2 = 1.0 - state.beta2 ** step
    new_m, new_v, updated = {}, {}, {}
    for name, value in tensors.items():
        g = grads[name]
        new_m[name] = state.beta1 * state.m[name] + (1.0 - state.beta1) * g
        new_v[name] = state.beta2 * state.v[name] + (1.0 - state.beta2) * (g * g)
        m_hat = new_m[name] / bc1
        v_hat = new_v[name] / bc2
        updated[name] = value - learning_rate * m_hat / (np.sqrt(v_hat) + state.eps)
    return _rebuild(params, updated), replace(state, m=new_m, v=new_v, step=step)


# ==============================================================================
# FENÊTRES
# ==============================================================================

def window_gradients(kind, params, inputs, targets, k: int):
    """
    Perte et gradients d'une fenêtre avec BPTT tronquée à ses k derniers pas.
    """
    N = inputs.shape[0]
    state = None
    if k < N:
        warm, _ = kind.run(params, inputs[:N - k], targets[:N - k])
        state = warm.final_state()
    trace, loss = kind.run(params, inputs[N - k:], targets[N - k:], initial_state=state)
    grads = kind.backward(params, trace, inputs[N - k:], targets[N - k:])
    return loss, grads.tensors()


def dataset_loss(kind, params, features, targets) -> float:
    """Perte MSE sur toutes les fenêtres, tous les pas (K = W·N)."""
    if len(features) == 0:
        raise DataError("dataset_loss : aucune fenêtre")
    outputs = []
    for x, y in zip(features, targets):
        trace, _ = kind.run(params, x, y)
        outputs.append(np.vstack(trace.outputs))
    outputs = np.stack(outputs)
    return mse_loss(outputs, targets, K=targets.shape[0] * targets.shape[1])


def _batch_update(kind, params, features, targets, batch, cfg: TrainConfig, adam: Optional[AdamState]):
    total, losses = None, []
    for i in batch:
        loss, grads = window_gradients(kind, params, features[i], targets[i], cfg.k)
        losses.append(loss)
        total = grads if total is None else {name: total[name] + g for name, g in grads.items()}
    mean_grads = {name: g / len(batch) for name, g in total.items()}

    if cfg.optimizer == "sgd":
        return sgd_step(params, mean_grads, cfg.learning_rate), adam, losses
    params, adam = adam_step(params, mean_grads, adam, cfg.learning_rate)
    return params, adam, losses


# ==============================================================================
# BOUCLE D'ENTRAÎNEMENT
# ==============================================================================

def fit(model, dataset, cfg: TrainConfig) -> TrainReport:
    """
    Entraîne `model` (RecurrentModel) sur le split train de `dataset`.
    Déterministe pour une graine donnée ; ne modifie pas model.params.
    """
    X_train, Y_train = dataset.subset("train")
    X_val, Y_val = dataset.subset("val")
    if len(X_train) == 0:
        raise DataError("fit : split d'entraînement vide")
    n, m, p = model.dims
    if m != dataset.n_features or p != Y_train.shape[2]:
        raise DimensionError(f"fit : modèle (m={m}, p={p}) pour {dataset.n_features} caractéristique(s)")
    if cfg.k > dataset.window:
        raise ConfigError(f"truncation k={cfg.k} > fenêtre N={dataset.window}")
    if len(X_val) == 0:
        logging.warning("⚠️  Split de validation vide : sélection sur la perte d'entraînement")

    kind = model.kind
    params = model.params
    report = TrainReport(params=params)
    report.initial_loss = dataset_loss(kind, params, X_train, Y_train)
    if cfg.epochs == 0:
        return report

    rng = np.random.default_rng(cfg.seed)
    adam = AdamState.fresh(params) if cfg.optimizer == "adam" else None
    best_loss = np.inf
    logging.info(
        f"🏋️  Entraînement {kind.name} (n={n}) : {len(X_train)} fenêtres, {cfg.epochs} époques, "
        f"lot {cfg.batch_size}, η={cfg.learning_rate}, {cfg.optimizer}, k={cfg.k}"
    )

    for epoch in range(cfg.epochs):
        order = rng.permutation(len(X_train))
        epoch_losses = []
        try:
            for start in range(0, len(order), cfg.batch_size):
                batch = order[start:start + cfg.batch_size]
                params, adam, losses = _batch_update(kind, params, X_train, Y_train, batch, cfg, adam)
                epoch_losses.extend(losses)
            train_loss = float(np.mean(epoch_losses))
            val_loss = dataset_loss(kind, params, X_val, Y_val) if len(X_val) else train_loss
        except (NumericalError, FloatingPointError) as exc:
            raise NumericalError(f"Divergence à l'époque {epoch} : {exc}") from exc
        if not (np.isfinite(train_loss) and np.isfinite(val_loss)):
            raise NumericalError(f"Divergence à l'époque {epoch} : perte non finie")
        if not all(np.all(np.isfinite(t)) for t in _tensors(params).values()):
            raise NumericalError(f"Divergence à l'époque {epoch} : paramètres non finis")

        report.train_loss.append(train_loss)
        report.val_loss.append(val_loss)
        if val_loss < best_loss:
            best_loss = val_loss
            report.best_epoch = epoch
            report.params = params

        logging.debug(f"   époque {epoch} : train={train_loss:.6e} val={val_loss:.6e}")
        if (epoch + 1) % cfg.log_every == 0 or epoch == cfg.epochs - 1:
            logging.info(f"📈 Époque {epoch + 1}/{cfg.epochs} : train={train_loss:.6e} | val={val_loss:.6e}")

    logging.info(f"✅ Meilleure époque (validation) : {report.best_epoch} (perte {best_loss:.6e})")
    return report
