# ==============================================================================
# MODULE: EXCEPTIONS - hiérarchie d'erreurs de la suite ECNN
# ------------------------------------------------------------------------------
# Chaque erreur porte son code de sortie CLI (contrat stable pour les scripts) :
#   0 succès | 1 usage/configuration | 2 données | 3 échec numérique
# ==============================================================================


class EcnnError(Exception):
    """Erreur de base de la suite."""
    exit_code = 1


class ConfigError(EcnnError):
    """Configuration invalide ou incohérente."""
    exit_code = 1


class DimensionError(EcnnError, ValueError):
    """Dimensions incompatibles entre vecteurs, matrices ou jeux de données."""
    exit_code = 1


class DataError(EcnnError):
    """Données d'entrée invalides (CSV, indicateurs, découpage)."""
    exit_code = 2


class NumericalError(EcnnError):
    """Divergence, valeur non finie ou vérification de gradient échouée."""
    exit_code = 3
