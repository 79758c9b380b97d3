# coldstart_kode/app/core/exceptions.py

from typing import Optional


class ColdStartError(Exception):
    """Erro base do toolkit."""


# ========== DADOS ==========

class DatasetParseError(ColdStartError):
    """Linha malformada no arquivo de ratings."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        prefix = f"linha {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


class EmptyDatasetError(ColdStartError):
    pass


class TooFewUsersError(ColdStartError):
    pass


class IndexRangeError(ColdStartError, IndexError):
    """Índice de usuário/item fora do intervalo denso."""


class SelectionRangeError(ColdStartError, ValueError):
    """Tamanho de entrevista maior que o número de itens."""


class NoDataError(ColdStartError):
    """Métrica sem nenhum par para agregar."""


class InsufficientDataError(ColdStartError):
    pass


class ItemLimitError(ColdStartError):
    """Catálogo grande demais para a matriz de similaridades."""


# ========== MODELOS ==========

class DivergenceError(ColdStartError):
    """Perda de treino explodiu ou ficou não finita."""

    def __init__(self, epoch: int, loss: float, reference: float):
        self.epoch = epoch
        self.loss = loss
        self.reference = reference
        super().__init__(
            f"Treino divergiu na época {epoch}: perda {loss:.4g} (referência {reference:.4g})"
        )


class ModelModeError(ColdStartError):
    """Operação incompatível com o modo do modelo (warm/cold/csw)."""


class CapabilityError(ColdStartError):
    """Preditor não suporta o protocolo pedido (ex.: MF sem fold-in em cold-start)."""


class LeakageError(ColdStartError):
    """Avaliação do Evaluation Set lida como entrada de modelo."""


# ========== ARQUIVOS ==========

class ModelFormatError(ColdStartError):
    pass


class ModelVersionError(ModelFormatError):
    def __init__(self, found: int, expected: int):
        self.found = found
        self.expected = expected
        super().__init__(f"Versão de arquivo de modelo {found} incompatível (esperada {expected})")


__all__ = [
    "ColdStartError",
    "DatasetParseError",
    "EmptyDatasetError",
    "TooFewUsersError",
    "IndexRangeError",
    "SelectionRangeError",
    "NoDataError",
    "InsufficientDataError",
    "ItemLimitError",
    "DivergenceError",
    "ModelModeError",
    "CapabilityError",
    "LeakageError",
    "ModelFormatError",
    "ModelVersionError",
]
