import json
from pathlib import Path
from typing import Any, List, Optional, Union

from pydantic import Field, ValidationError, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from provcalc.exceptions import ConfigError
from provcalc.schemas import Membership, Strategy


class Settings(BaseSettings):
    # Univers d'instanciation
    UNIVERSE_EXTRAS: Union[List[str], str] = Field(
        default_factory=list,
        description="Names added to every instantiation universe"
    )

    # Bornes de recherche
    MAX_STATES: int = Field(
        default=10000,
        ge=1,
        description="Maximum number of distinct states visited by a search"
    )

    MAX_DEPTH: int = Field(
        default=64,
        ge=1,
        description="Maximum number of moves from the initial state"
    )

    MAX_DAG_VERTICES: int = Field(
        default=16,
        ge=1,
        description="Largest DAG accepted by canonical form search"
    )

    # Recherche de dérivations
    YIELDS_PRUNING: bool = Field(
        default=True,
        description="Prune yields states whose denotation no longer contains the goal's"
    )

    STRATEGY: Strategy = Field(
        default=Strategy.EXHAUSTIVE,
        description="Execution strategy for run"
    )

    SEED: int = Field(
        default=0,
        ge=-(2 ** 63),
        le=2 ** 63 - 1,
        description="Seed for the random term generators"
    )

    MEMBERSHIP: Membership = Field(
        default=Membership.WITNESS,
        description="Ideal membership by single witness or by stepwise merging"
    )

    WORKERS: int = Field(
        default=1,
        ge=1,
        le=64,
        description="Thread pool size for frontier expansion and membership tests"
    )

    # Logging
    LOG_LEVEL: str = Field(
        default="WARNING",
        pattern=r"^(DEBUG|INFO|WARNING|ERROR|CRITICAL)$"
    )

    LOG_FILE: Optional[str] = Field(
        default=None,
        description="Optional log file, in addition to stderr"
    )

    model_config = SettingsConfigDict(
        env_prefix="PROVCALC_",
        env_file=".env",
        env_file_encoding="utf-8",
        # Autorise les variables supplémentaires sans erreur
        extra="ignore",
    )

    @field_validator("UNIVERSE_EXTRAS", mode="before")
    def parse_universe_extras(cls, v):
        if isinstance(v, str):
            if not v.strip():
                return []
            try:
                return json.loads(v)
            except json.JSONDecodeError:
                return [name.strip() for name in v.split(",") if name.strip()]
        return v

    @property
    def universe_extras(self) -> List[str]:
        return list(self.UNIVERSE_EXTRAS)

    def header(self) -> str:
        """Écho déterministe de la configuration effective"""
        return " ".join(f"{key}={value}" for key, value in self.as_dict().items())

    def as_dict(self) -> dict:
        return {
            "universe_extras": ",".join(self.universe_extras),
            "max_states": str(self.MAX_STATES),
            "max_depth": str(self.MAX_DEPTH),
            "max_dag_vertices": str(self.MAX_DAG_VERTICES),
            "strategy": self.STRATEGY.value,
            "seed": str(self.SEED),
            "membership": self.MEMBERSHIP.value,
            "yields_pruning": str(self.YIELDS_PRUNING).lower(),
        }


def load_settings(config_file: Optional[str] = None, **overrides: Any) -> Settings:
    """Construit la configuration depuis la CLI, l'environnement, le fichier et les défauts

    Args:
        config_file: fichier clé=valeur, clés préfixées par PROVCALC_
        overrides: valeurs explicites, ignorées si None

    Returns:
        Settings validés
    """
    kwargs = {key: value for key, value in overrides.items() if value is not None}
    if config_file is not None:
        if not Path(config_file).is_file():
            raise ConfigError(f"config file not found: {config_file}")
        kwargs["_env_file"] = config_file
    try:
        return Settings(**kwargs)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in err['loc'])}: {err['msg']}" for err in e.errors()
        )
        raise ConfigError(f"invalid configuration: {problems}") from e


settings = Settings()
