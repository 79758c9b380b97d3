# coldstart_kode/app/core/config.py

from pathlib import Path
from typing import Any, Optional

from dotenv import dotenv_values
from loguru import logger
from pydantic import Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Configurações globais carregadas de variáveis de ambiente (prefixo COLDSTART_)."""

    model_config = SettingsConfigDict(
        env_prefix="COLDSTART_",
        case_sensitive=True,
        extra="forbid",
    )

    # 🔹 Reprodutibilidade
    DEFAULT_SEED: int = Field(42, description="Semente usada quando --seed não é informado")

    # 🔹 Hiperparâmetros padrão de treino
    LATENT_DIM: int = Field(20, ge=1)
    LEARNING_RATE: float = Field(0.01, gt=0)
    LAMBDA1: float = Field(1e-4, ge=0)
    LAMBDA2: float = Field(0.0, ge=0)
    EPOCHS: int = Field(20, ge=1)

    # 🔹 Ingestão
    SEPARATOR: str = Field("\t", description="Separador padrão das linhas de rating")
    THRESHOLD: Optional[float] = Field(None, description="Limiar de binarização (None = padrão da escala)")
    MIN_USER_RATINGS: int = Field(0, ge=0)

    # 🔹 ItemKNN
    ITEMKNN_MAX_ITEMS: int = Field(50_000, ge=1)
    ITEMKNN_K: int = Field(20, ge=1)

    # 🔹 Guarda de divergência do SGD
    DIVERGENCE_FACTOR: float = Field(1e6, gt=1)

    # 🔹 Kernels numba (False = interpretador, útil para depuração)
    JIT_ENABLED: bool = Field(True)

    # 🔹 Logging
    LOG_LEVEL: str = Field("INFO")
    LOG_DIR: str = Field("logs", description="Diretório do log rotativo; vazio desativa o arquivo")

    # 🔹 Celery (células do sweep)
    CELERY_BROKER_URL: Optional[str] = Field(None)
    CELERY_EAGER: bool = Field(True)


def load_settings(config_file: Optional[str] = None, **overrides: Any) -> Settings:
    """
    Monta as configurações na ordem: padrões < ambiente < arquivo key=value < flags.
    Chaves do arquivo podem vir com ou sem o prefixo COLDSTART_.
    """
    values: dict = {}
    if config_file:
        path = Path(config_file)
        if not path.is_file():
            raise FileNotFoundError(f"Arquivo de configuração não encontrado: {config_file}")
        for key, value in dotenv_values(path).items():
            if value is None:
                continue
            name = key.strip().upper()
            if name.startswith("COLDSTART_"):
                name = name[len("COLDSTART_"):]
            values[name] = value

    values.update({k: v for k, v in overrides.items() if v is not None})

    try:
        return Settings(**values)
    except ValidationError as e:
        logger.error(f"❌ Erro na configuração: {e}")
        raise


# ✅ Instância de configurações
try:
    settings = Settings()
except ValidationError as e:
    logger.error(f"❌ Erro na configuração: {e}")
    raise
