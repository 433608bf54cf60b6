# ==============================================================================
# MODULE: PREDICTION ANALYZER - checkpoints et prévisions à un pas
# ------------------------------------------------------------------------------
# Format de checkpoint (binaire, petit-boutiste) :
#   8 octets  : b"ECNNCK" + version uint16
#   1 octet   : famille (0 ecnn, 1 rnn, 2 lstm)
#   12 octets : n, m, p en uint32
#   puis chaque tenseur dans l'ordre de params.tensors(), float64 ligne à ligne
#
# Protocole de prévision sur une fenêtre de N pas :
#   - les N−1 premiers pas chauffent l'état, erreurs réelles réinjectées
#   - le dernier pas est prévu avec l'erreur du dernier pas de chauffe
#   - N = 1 : un seul pas depuis l'état nul
# ==============================================================================

import logging
import struct
from pathlib import Path

import numpy as np
import pandas as pd

from exceptions import DataError, DimensionError
from model_registry import RecurrentModel, kind_from_tag

MAGIC = b"ECNNCK"
VERSION = 1
_HEADER = struct.Struct("<6sHBIII")


# ==============================================================================
# CHECKPOINTS
# ==============================================================================

def save_checkpoint(model: RecurrentModel, path) -> Path:
    path = Path(path)
    n, m, p = model.dims
    chunks = [_HEADER.pack(MAGIC, VERSION, model.kind.tag, n, m, p)]
    for tensor in model.params.tensors().values():
        chunks.append(np.ascontiguousarray(tensor, dtype="<f8").tobytes())
    path.write_bytes(b"".join(chunks))
    logging.info(f"💾 Checkpoint {model.kind.name} (n={n}, m={m}, p={p}) → {path}")
    return path


def load_checkpoint(path, expected_dims: tuple = None) -> RecurrentModel:
    """Relit un checkpoint ; `expected_dims` = (m, p) attendus par le jeu de données."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"Checkpoint introuvable : {path}")

    model = _read_checkpoint(path)

    if expected_dims is not None and (model.params.m, model.params.p) != tuple(expected_dims):
        raise DimensionError(
            f"Checkpoint {path.name} : m={model.params.m}, p={model.params.p} "
            f"incompatibles avec le jeu de données (m={expected_dims[0]}, p={expected_dims[1]})"
        )
    return model


def _read_checkpoint(path: Path) -> RecurrentModel:
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise DataError(f"Checkpoint {path.name} tronqué (en-tête)")
    magic, version, tag, n, m, p = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise DataError(f"Checkpoint {path.name} : signature invalide")
    if version != VERSION:
        raise DataError(f"Checkpoint {path.name} : version {version} non supportée")

    kind = kind_from_tag(tag)
    # les formes se déduisent d'un modèle gabarit de mêmes dimensions
    template = kind.init(n, m, p, 0).tensors()
    expected = _HEADER.size + 8 * sum(t.size for t in template.values())
    if len(raw) != expected:
        raise DataError(f"Checkpoint {path.name} : {len(raw)} octets, attendu {expected}")

    tensors, offset = {}, _HEADER.size
    for name, shape_ref in template.items():
        values = np.frombuffer(raw, dtype="<f8", count=shape_ref.size, offset=offset)
        tensors[name] = values.astype(np.float64).reshape(shape_ref.shape)
        offset += 8 * shape_ref.size

    logging.info(f"📥 Checkpoint {path.name} : {kind.name} (n={n}, m={m}, p={p})")
    return RecurrentModel(kind=kind, params=kind.from_tensors(tensors))


# ==============================================================================
# PRÉVISIONS
# ==============================================================================

def predict_window(model: RecurrentModel, inputs, targets) -> np.ndarray:
    """Prévision du dernier pas d'une fenêtre (vecteur de taille p)."""
    inputs = np.asarray(inputs, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if inputs.shape[0] != targets.shape[0]:
        raise DimensionError(f"predict_window : {inputs.shape[0]} entrées pour {targets.shape[0]} cibles")
    if inputs.shape[0] == 1:
        trace, _ = model.kind.run(model.params, inputs, np.zeros_like(targets))
        return trace.outputs[-1]
    return model.kind.forecast(model.params, inputs[:-1], targets[:-1], inputs[-1:])[-1]


def predict_windows(model: RecurrentModel, features, targets) -> np.ndarray:
    """Sorties (espace du modèle, première composante) pour chaque fenêtre."""
    if len(features) == 0:
        return np.empty(0)
    return np.array([predict_window(model, x, y)[0] for x, y in zip(features, targets)])


def predict_split(model: RecurrentModel, dataset, split: str = "test") -> pd.DataFrame:
    """Prévisions dénormalisées : date, actual, predicted (une ligne par fenêtre)."""
    features, targets = dataset.subset(split)
    if len(features) == 0:
        raise DataError(f"Split '{split}' vide : aucune prévision possible")
    raw = predict_windows(model, features, targets)
    s = dataset.splits[split]
    return pd.DataFrame({
        "date": dataset.target_dates[s],
        "actual": dataset.target_prices[s],
        "predicted": dataset.denormalize(raw, split),
    })


class PredictionAnalyzer:
    """Évalue un checkpoint sur un jeu fenêtré."""

    def __init__(self, checkpoint, dataset):
        self.dataset = dataset
        self.model = load_checkpoint(checkpoint, expected_dims=(dataset.n_features, 1))

    def run(self, split: str = "test") -> pd.DataFrame:
        predictions = predict_split(self.model, self.dataset, split)
        logging.info(f"🔮 {len(predictions)} prévision(s) à un pas sur '{split}' ({self.model.kind.name})")
        return predictions
