# ==============================================================================
# MODULE: DATASET BUILDER - découpage, normalisation min-max et fenêtres glissantes
# ------------------------------------------------------------------------------
# Découpage chronologique : entraînement (le plus ancien), validation, test
# (le plus récent), en fractions des lignes valides ou en plages de dates.
#
# Normalisation : x̂ = (x − min)/(max − min), min/max ajustés sur la plage
# d'entraînement SEULEMENT puis appliqués partout.
#
# Fenêtre finissant en t (taille N) : caractéristiques des lignes t−N+1..t ;
# cible du pas r = clôture normalisée en r + horizon. Une fenêtre appartient
# au split qui contient sa cible finale (ligne t + horizon).
# ==============================================================================

import logging
from dataclasses import dataclass, field
from pathlib import Path

import joblib
import numpy as np
import pandas as pd
from sklearn.preprocessing import MinMaxScaler

from exceptions import ConfigError, DataError, DimensionError
from technical_analyzer import FEATURE_COLUMNS, FeatureFrame

SPLITS = ("train", "val", "test")


# ==============================================================================
# DÉCOUPAGE
# ==============================================================================

@dataclass(frozen=True)
class SplitSpec:
    """Fractions (train, val, test) ou plages de dates {split: (début, fin)} inclusives."""
    train: float = 0.8
    val: float = 0.1
    test: float = 0.1
    date_ranges: dict = None

    def __post_init__(self):
        if self.date_ranges:
            missing = [s for s in SPLITS if s not in self.date_ranges]
            if missing:
                raise ConfigError(f"SplitSpec : plage(s) manquante(s) {missing}")
            bounds = [tuple(pd.Timestamp(d) for d in self.date_ranges[s]) for s in SPLITS]
            for start, end in bounds:
                if start > end:
                    raise ConfigError(f"SplitSpec : plage inversée {start.date()} > {end.date()}")
            if not (bounds[0][1] < bounds[1][0] and bounds[1][1] < bounds[2][0]):
                raise ConfigError("SplitSpec : les plages doivent être chronologiques train < val < test")
            return
        fractions = (self.train, self.val, self.test)
        if any(f < 0 for f in fractions) or abs(sum(fractions) - 1.0) > 1e-9:
            raise ConfigError(f"SplitSpec : fractions {fractions} invalides (somme 1 attendue)")

    def assign(self, dates) -> np.ndarray:
        """Étiquette de split par ligne ('' hors de toute plage)."""
        labels = np.full(len(dates), "", dtype=object)
        if self.date_ranges:
            for split in SPLITS:
                start, end = (pd.Timestamp(d) for d in self.date_ranges[split])
                labels[(dates >= start) & (dates <= end)] = split
            return labels

        total = len(dates)
        n_train = int(round(total * self.train))
        n_train_val = int(round(total * (self.train + self.val)))
        labels[:n_train] = "train"
        labels[n_train:n_train_val] = "val"
        labels[n_train_val:] = "test"
        return labels


def split_labels(frame: FeatureFrame, split: SplitSpec) -> np.ndarray:
    """Étiquettes ligne à ligne ; les lignes de chauffe restent hors split."""
    valid = frame.valid.to_numpy()
    labels = np.full(len(frame), "", dtype=object)
    labels[valid] = split.assign(frame.frame.index[valid])
    return labels


# ==============================================================================
# NORMALISATION
# ==============================================================================

@dataclass
class NormalizationConstants:
    """Min/max par colonne, ajustés sur l'entraînement (MinMaxScaler sklearn)."""
    features: list
    scaler: MinMaxScaler

    @property
    def minimum(self) -> np.ndarray:
        return self.scaler.data_min_

    @property
    def maximum(self) -> np.ndarray:
        return self.scaler.data_max_

    def transform(self, values) -> np.ndarray:
        return self.scaler.transform(np.asarray(values, dtype=np.float64))

    def inverse_transform(self, values) -> np.ndarray:
        return self.scaler.inverse_transform(np.asarray(values, dtype=np.float64))

    def column(self, name: str) -> tuple:
        idx = self.features.index(name)
        return float(self.minimum[idx]), float(self.maximum[idx])

    def save(self, path) -> Path:
        """Fichier texte feature,min,max + scaler joblib (.pkl) à côté."""
        path = Path(path)
        pd.DataFrame({"feature": self.features, "min": self.minimum, "max": self.maximum}).to_csv(
            path, index=False, float_format="%.17g"
        )
        joblib.dump(self.scaler, path.with_suffix(".pkl"))
        return path


def normalize(frame: FeatureFrame, split: SplitSpec, features=None) -> NormalizationConstants:
    """Ajuste les constantes min-max sur les lignes valides du split d'entraînement."""
    features = list(features or frame.columns)
    unknown = [f for f in features if f not in frame.columns]
    if unknown:
        raise ConfigError(f"Caractéristique(s) inconnue(s) : {', '.join(unknown)}")

    labels = split_labels(frame, split)
    train_rows = frame.frame.loc[labels == "train", features]
    if train_rows.empty:
        raise DataError("Normalisation : aucune ligne valide dans le split d'entraînement")

    lo, hi = train_rows.min(), train_rows.max()
    degenerate = [f for f in features if not hi[f] > lo[f]]
    if degenerate:
        raise DataError(f"Normalisation impossible : max = min sur {', '.join(degenerate)}")

    scaler = MinMaxScaler()
    # ndarray : transform() n'exige alors pas de noms de colonnes
    scaler.fit(train_rows.to_numpy(dtype=np.float64))
    return NormalizationConstants(features=features, scaler=scaler)


# ==============================================================================
# FENÊTRES GLISSANTES
# ==============================================================================

@dataclass
class WindowedDataset:
    features: np.ndarray        # (W, N, m) espace du modèle
    targets: np.ndarray         # (W, N, 1) cibles pas à pas
    end_rows: np.ndarray        # ligne t de fin de chaque fenêtre
    target_dates: pd.Index      # date (ou position) de la cible finale
    splits: dict                # split -> slice sur l'axe des fenêtres
    feature_names: list
    horizon: int = 1
    anchor_prices: np.ndarray = None   # clôture brute en t
    target_prices: np.ndarray = None   # clôture brute en t + horizon
    target_min: float = 0.0
    target_max: float = 1.0
    constants: NormalizationConstants = None
    levels: np.ndarray = None          # niveau lissé l_t par fenêtre
    transform: object = field(default=None, repr=False)

    @property
    def window(self) -> int:
        return self.features.shape[1]

    @property
    def n_features(self) -> int:
        return self.features.shape[2]

    def __len__(self) -> int:
        return self.features.shape[0]

    def count(self, split: str) -> int:
        s = self.splits[split]
        return s.stop - s.start

    def subset(self, split: str) -> tuple:
        s = self.splits[split]
        return self.features[s], self.targets[s]

    def denormalize(self, values, split: str = None) -> np.ndarray:
        """Sorties du modèle (cible finale par fenêtre) → prix."""
        values = np.asarray(values, dtype=np.float64).reshape(-1)
        idx = self.splits[split] if split else slice(0, len(self))
        if self.levels is not None:
            return self.transform.from_model_space(values, self.levels[idx])
        return self.target_min + values * (self.target_max - self.target_min)

    def to_csv(self, path) -> Path:
        """Une ligne par fenêtre : date, split, cible puis caractéristiques aplaties."""
        path = Path(path)
        W, N, m = self.features.shape
        columns = [f"{name}_t-{N - 1 - k}" for k in range(N) for name in self.feature_names]
        flat = pd.DataFrame(self.features.reshape(W, N * m), columns=columns)
        labels = np.empty(W, dtype=object)
        for name, s in self.splits.items():
            labels[s] = name
        dates = self.target_dates
        if isinstance(dates, pd.DatetimeIndex):
            dates = dates.strftime("%Y-%m-%d")
        flat.insert(0, "target", self.targets[:, -1, 0])
        flat.insert(0, "split", labels)
        flat.insert(0, "date", np.asarray(dates))
        flat.to_csv(path, index=False, float_format="%.10g")
        return path


def windows_from_arrays(features, step_targets, labels, window: int, horizon: int = 1,
                        dates=None) -> WindowedDataset:
    """
    Fenêtrage générique sur des tableaux alignés ligne à ligne.

    step_targets[r] est la cible associée à la ligne d'entrée r ; labels[r] le
    split de la ligne r ('' = ignorée). Une fenêtre finissant en t est retenue
    si ses N lignes sont finies et si la ligne t + horizon a un split.
    """
    features = np.asarray(features, dtype=np.float64)
    step_targets = np.asarray(step_targets, dtype=np.float64).reshape(-1)
    labels = np.asarray(labels, dtype=object)
    if window < 1 or horizon < 1:
        raise ConfigError(f"Fenêtre invalide : N={window}, horizon={horizon}")
    if features.ndim != 2 or step_targets.shape[0] != features.shape[0] or labels.shape[0] != features.shape[0]:
        raise DimensionError("windows_from_arrays : longueurs incohérentes")
    rows = features.shape[0]
    for split in SPLITS:
        n_rows = int(np.sum(labels == split))
        if window > n_rows:
            raise DataError(f"Fenêtre N={window} plus grande que le split '{split}' ({n_rows} lignes)")

    finite = np.all(np.isfinite(features), axis=1) & np.isfinite(step_targets)
    picked = {s: [] for s in SPLITS}
    for t in range(window - 1, rows - horizon):
        label = labels[t + horizon]
        if label in picked and finite[t - window + 1:t + 1].all():
            picked[label].append(t)

    ends = np.array(picked["train"] + picked["val"] + picked["test"], dtype=int)
    if ends.size == 0:
        raise DataError("Aucune fenêtre constructible")
    index = (ends - window + 1)[:, None] + np.arange(window)[None, :]

    splits, cursor = {}, 0
    for split in SPLITS:
        splits[split] = slice(cursor, cursor + len(picked[split]))
        cursor += len(picked[split])

    positions = pd.Index(ends + horizon) if dates is None else pd.Index(dates)[ends + horizon]
    return WindowedDataset(
        features=features[index],
        targets=step_targets[index][:, :, None],
        end_rows=ends,
        target_dates=positions,
        splits=splits,
        feature_names=[f"x{j}" for j in range(features.shape[1])],
        horizon=horizon,
        target_prices=step_targets[ends],
    )


def make_windows(frame: FeatureFrame, split: SplitSpec, window: int, horizon: int = 1,
                 features=None, transform=None) -> WindowedDataset:
    """
    Construit le jeu fenêtré depuis un FeatureFrame.

    `transform` (voir smoothing.SmoothingTransform) remplace la normalisation
    min-max pour ses colonnes de prix et pour la cible.
    """
    features = list(features or FEATURE_COLUMNS)
    unknown = [f for f in features if f not in frame.columns]
    if unknown:
        raise ConfigError(f"Caractéristique(s) inconnue(s) : {', '.join(unknown)}")
    if "close" not in frame.columns:
        raise DataError("La colonne 'close' est requise comme cible")

    labels = split_labels(frame, split)
    invalid = ~frame.valid.to_numpy()
    close = frame.frame["close"].to_numpy(dtype=np.float64)

    price_cols = [f for f in features if transform is not None and f in transform.price_columns]
    scaled_cols = [f for f in features if f not in price_cols]

    values = np.full((len(close), len(features)), np.nan)
    constants = None
    if scaled_cols:
        constants = normalize(frame, split, scaled_cols)
        scaled = constants.transform(frame.frame[scaled_cols].fillna(0.0).to_numpy())
        for j, col in enumerate(scaled_cols):
            values[:, features.index(col)] = scaled[:, j]

    step_targets = np.full(len(close), np.nan)
    levels = None
    if transform is not None:
        levels = transform.levels(close)
        for col in price_cols:
            values[:, features.index(col)] = transform.to_model_space(frame.frame[col].to_numpy(dtype=np.float64), levels)
        step_targets[:-horizon] = transform.to_model_space(close[horizon:], levels[:-horizon])
        target_min, target_max = 0.0, 1.0
    else:
        train_close = close[labels == "train"]
        if train_close.size == 0:
            raise DataError("Aucune ligne d'entraînement pour normaliser la clôture")
        target_min, target_max = float(train_close.min()), float(train_close.max())
        if not target_max > target_min:
            raise DataError("Normalisation impossible : max = min sur close")
        step_targets[:-horizon] = (close[horizon:] - target_min) / (target_max - target_min)

    values[invalid] = np.nan
    dataset = windows_from_arrays(values, step_targets, labels, window, horizon, dates=frame.frame.index)

    ends = dataset.end_rows
    dataset.feature_names = features
    dataset.anchor_prices = close[ends]
    dataset.target_prices = close[ends + horizon]
    dataset.target_min, dataset.target_max = target_min, target_max
    dataset.constants = constants
    dataset.levels = None if levels is None else levels[ends]
    dataset.transform = transform
    logging.info(
        f"📊 Fenêtres N={window} : train={dataset.count('train')} | "
        f"val={dataset.count('val')} | test={dataset.count('test')}"
    )
    return dataset
