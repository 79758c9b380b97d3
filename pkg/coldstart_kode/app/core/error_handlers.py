from functools import wraps
from typing import Callable

from pydantic import ValidationError

from coldstart_kode.app.core.exceptions import (
    CapabilityError,
    ColdStartError,
    DatasetParseError,
    DivergenceError,
    EmptyDatasetError,
    IndexRangeError,
    InsufficientDataError,
    ItemLimitError,
    LeakageError,
    ModelFormatError,
    ModelModeError,
    ModelVersionError,
    NoDataError,
    SelectionRangeError,
    TooFewUsersError,
)
from coldstart_kode.app.utilities import constants
from coldstart_kode.app.utilities.logging_config import logger

# Ordem importa: subclasses antes das classes base.
EXIT_CODES = (
    (ModelVersionError, constants.EXIT_VERSION),
    (ModelFormatError, constants.EXIT_FORMAT),
    (DatasetParseError, constants.EXIT_FORMAT),
    (FileNotFoundError, constants.EXIT_MISSING_FILE),
    (LeakageError, constants.EXIT_LEAKAGE),
    (DivergenceError, constants.EXIT_TRAINING),
    (CapabilityError, constants.EXIT_CAPABILITY),
    (ModelModeError, constants.EXIT_CAPABILITY),
    (EmptyDatasetError, constants.EXIT_DATA),
    (TooFewUsersError, constants.EXIT_DATA),
    (NoDataError, constants.EXIT_DATA),
    (InsufficientDataError, constants.EXIT_DATA),
    (ItemLimitError, constants.EXIT_DATA),
    (IndexRangeError, constants.EXIT_USAGE),
    (SelectionRangeError, constants.EXIT_USAGE),
    (ValidationError, constants.EXIT_USAGE),
    (ColdStartError, constants.EXIT_INTERNAL),
)


def exit_code_for(exc: BaseException) -> int:
    for exc_type, code in EXIT_CODES:
        if isinstance(exc, exc_type):
            return code
    return constants.EXIT_INTERNAL


def handle_command(func: Callable[..., int]) -> Callable[..., int]:
    """
    Envolve um comando da CLI: exceções viram código de saída distinto com
    diagnóstico no stderr (via logger).
    """
    @wraps(func)
    def wrapper(*args, **kwargs) -> int:
        try:
            result = func(*args, **kwargs)
            return constants.EXIT_OK if result is None else int(result)
        except KeyboardInterrupt:
            logger.warning("⚠️ Interrompido pelo usuário")
            return constants.EXIT_INTERNAL
        except Exception as exc:
            code = exit_code_for(exc)
            if code == constants.EXIT_INTERNAL and not isinstance(exc, ColdStartError):
                logger.exception(f"❌ Erro interno: {exc}")
            else:
                logger.error(f"❌ {type(exc).__name__}: {exc}")
            return code

    return wrapper


__all__ = ["EXIT_CODES", "exit_code_for", "handle_command"]
