# ==============================================================================
# MODULE: MODEL REGISTRY - les trois familles de modèles derrière une même API
# ------------------------------------------------------------------------------
# Le trainer, le prédicteur, le vérificateur de gradients et le format de
# checkpoint manipulent les modèles uniquement via ModelKind.
# ==============================================================================

from dataclasses import dataclass
from typing import Callable

import baselines
import ecnn
from exceptions import ConfigError


@dataclass(frozen=True)
class ModelKind:
    name: str
    tag: int                 # identifiant dans l'en-tête du checkpoint
    init: Callable           # (n, m, p, seed) -> params
    forward: Callable        # (params, inputs, targets, *état initial) -> (trace, perte)
    backward: Callable       # (params, trace, inputs, targets) -> gradients
    forecast: Callable       # (params, warmup_x, warmup_y, future_x) -> prédictions
    params_type: type

    def from_tensors(self, tensors: dict):
        return self.params_type.from_tensors(**tensors)

    def build(self, tensors: dict):
        """Nouveaux paramètres à partir de tenseurs déjà validés (sortie d'optimiseur)."""
        return self.params_type(**tensors)

    def run(self, params, inputs, targets, initial_state=None):
        if initial_state is None:
            return self.forward(params, inputs, targets)
        return self.forward(params, inputs, targets, *initial_state)


MODEL_KINDS = {
    "ecnn": ModelKind(
        name="ecnn", tag=0,
        init=ecnn.init_params,
        forward=ecnn.forward_sequence,
        backward=ecnn.bptt_gradients,
        forecast=ecnn.forecast,
        params_type=ecnn.EcnnParams,
    ),
    "rnn": ModelKind(
        name="rnn", tag=1,
        init=baselines.init_rnn_params,
        forward=baselines.rnn_forward,
        backward=baselines.rnn_bptt,
        forecast=baselines.rnn_forecast,
        params_type=baselines.RnnParams,
    ),
    "lstm": ModelKind(
        name="lstm", tag=2,
        init=baselines.init_lstm_params,
        forward=baselines.lstm_forward,
        backward=baselines.lstm_bptt,
        forecast=baselines.lstm_forecast,
        params_type=baselines.LstmParams,
    ),
}


def get_model_kind(name: str) -> ModelKind:
    try:
        return MODEL_KINDS[name.lower()]
    except KeyError:
        raise ConfigError(f"Modèle inconnu '{name}' (choix : {', '.join(MODEL_KINDS)})") from None


def kind_from_tag(tag: int) -> ModelKind:
    for kind in MODEL_KINDS.values():
        if kind.tag == tag:
            return kind
    raise ConfigError(f"Tag de modèle inconnu dans le checkpoint : {tag}")


@dataclass
class RecurrentModel:
    """Un modèle = sa famille + ses paramètres courants."""
    kind: ModelKind
    params: object

    @property
    def dims(self) -> tuple:
        return self.params.n, self.params.m, self.params.p
