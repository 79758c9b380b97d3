"""
Contêineres numéricos imutáveis (arrays numpy) compartilhados pelos serviços.
"""

from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, Iterator, NamedTuple, Optional, Tuple

import numpy as np
from scipy import sparse

from ..core.exceptions import IndexRangeError
from .schemas import Hyperparams, ModelMode, UserSet


class RatingTriple(NamedTuple):
    user: int
    item: int
    raw: float
    value: float


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def _csr_index(keys: np.ndarray, size: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Índice CSR estável: (indptr, ordem das entradas agrupadas por chave).
    """
    order = np.argsort(keys, kind="stable")
    counts = np.bincount(keys, minlength=size)
    indptr = np.zeros(size + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, order.astype(np.int64)


# ========== RATINGS ==========

@dataclass(frozen=True, eq=False)
class SparseRatings:
    """
    Conjunto O de triplas (usuário, item, rating) com índices densos 0-based.
    As triplas ficam em ordem canônica (usuário, item); `values` vale 0 até a
    binarização e ±1 depois.
    """
    num_users: int
    num_items: int
    users: np.ndarray
    items: np.ndarray
    raw: np.ndarray
    values: np.ndarray
    user_ids: Optional[np.ndarray] = None
    item_ids: Optional[np.ndarray] = None
    user_indptr: np.ndarray = field(init=False, repr=False)
    user_entries: np.ndarray = field(init=False, repr=False)
    item_indptr: np.ndarray = field(init=False, repr=False)
    item_entries: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        users = np.asarray(self.users, dtype=np.int64)
        items = np.asarray(self.items, dtype=np.int64)
        if users.shape != items.shape:
            raise ValueError("users e items devem ter o mesmo tamanho.")
        if users.size and (users.min() < 0 or users.max() >= self.num_users):
            raise IndexRangeError("Índice de usuário fora de [0, U).")
        if items.size and (items.min() < 0 or items.max() >= self.num_items):
            raise IndexRangeError("Índice de item fora de [0, I).")

        order = np.lexsort((items, users))
        users, items = users[order], items[order]
        raw = np.asarray(self.raw, dtype=np.float64)[order]
        values = np.asarray(self.values, dtype=np.float64)[order]
        if users.size > 1:
            same = (users[1:] == users[:-1]) & (items[1:] == items[:-1])
            if same.any():
                raise ValueError("Pares (usuário, item) duplicados em SparseRatings.")

        object.__setattr__(self, "users", _frozen_array(users, np.int64))
        object.__setattr__(self, "items", _frozen_array(items, np.int64))
        object.__setattr__(self, "raw", _frozen_array(raw, np.float64))
        object.__setattr__(self, "values", _frozen_array(values, np.float64))

        user_indptr, user_entries = _csr_index(users, self.num_users)
        item_indptr, item_entries = _csr_index(items, self.num_items)
        for name, arr in (
            ("user_indptr", user_indptr),
            ("user_entries", user_entries),
            ("item_indptr", item_indptr),
            ("item_entries", item_entries),
        ):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    # ---------- tamanhos ----------

    def __len__(self) -> int:
        return int(self.users.size)

    @property
    def is_binarized(self) -> bool:
        return bool(self.values.size) and bool(np.all(np.abs(self.values) == 1.0))

    def user_counts(self) -> np.ndarray:
        return np.diff(self.user_indptr)

    def item_counts(self) -> np.ndarray:
        return np.diff(self.item_indptr)

    def active_users(self) -> np.ndarray:
        return np.flatnonzero(self.user_counts() > 0)

    # ---------- visões de adjacência ----------

    def by_user(self, user: int) -> Tuple[np.ndarray, np.ndarray]:
        """(itens, valores) do usuário, itens em ordem crescente."""
        if not 0 <= user < self.num_users:
            raise IndexRangeError(f"Usuário {user} fora de [0, {self.num_users}).")
        sl = self.user_entries[self.user_indptr[user]:self.user_indptr[user + 1]]
        return self.items[sl], self.values[sl]

    def by_item(self, item: int) -> Tuple[np.ndarray, np.ndarray]:
        """(usuários, valores) do item, usuários em ordem crescente."""
        if not 0 <= item < self.num_items:
            raise IndexRangeError(f"Item {item} fora de [0, {self.num_items}).")
        sl = self.item_entries[self.item_indptr[item]:self.item_indptr[item + 1]]
        return self.users[sl], self.values[sl]

    def triples(self) -> Iterator[RatingTriple]:
        for u, i, r, v in zip(self.users, self.items, self.raw, self.values):
            yield RatingTriple(int(u), int(i), float(r), float(v))

    # ---------- derivações ----------

    def with_values(self, values: np.ndarray) -> "SparseRatings":
        return self._derive(np.ones(len(self), dtype=bool), values=values)

    def select(self, mask: np.ndarray) -> "SparseRatings":
        """Mantém só as triplas marcadas, preservando o espaço de índices."""
        return self._derive(np.asarray(mask, dtype=bool))

    def restrict_users(self, users: Iterable[int]) -> "SparseRatings":
        keep = np.zeros(self.num_users, dtype=bool)
        keep[np.asarray(list(users), dtype=np.int64)] = True
        return self.select(keep[self.users])

    def _derive(self, mask: np.ndarray, values: Optional[np.ndarray] = None) -> "SparseRatings":
        vals = self.values if values is None else np.asarray(values, dtype=np.float64)
        return SparseRatings(
            num_users=self.num_users,
            num_items=self.num_items,
            users=self.users[mask],
            items=self.items[mask],
            raw=self.raw[mask],
            values=vals[mask],
            user_ids=self.user_ids,
            item_ids=self.item_ids,
        )

    def union(self, users: np.ndarray, items: np.ndarray, values: np.ndarray) -> "SparseRatings":
        """
        Acrescenta triplas (binarizadas) ao conjunto; pares já presentes são rejeitados.
        O raw das novas triplas repete o valor binário.
        """
        values = np.asarray(values, dtype=np.float64)
        return SparseRatings(
            num_users=self.num_users,
            num_items=self.num_items,
            users=np.concatenate([self.users, np.asarray(users, dtype=np.int64)]),
            items=np.concatenate([self.items, np.asarray(items, dtype=np.int64)]),
            raw=np.concatenate([self.raw, values]),
            values=np.concatenate([self.values, values]),
            user_ids=self.user_ids,
            item_ids=self.item_ids,
        )


# ========== RESPOSTAS ==========

@dataclass(frozen=True, eq=False)
class AnswerList:
    """
    Respostas (item, valor ±1) de um usuário, em ordem crescente de item.
    A ordem canônica garante soma determinística da representação.
    """
    items: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    values: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.float64))

    def __post_init__(self):
        items = np.asarray(self.items, dtype=np.int64).ravel()
        values = np.asarray(self.values, dtype=np.float64).ravel()
        if items.shape != values.shape:
            raise ValueError("items e values devem ter o mesmo tamanho.")
        order = np.argsort(items, kind="stable")
        items, values = items[order], values[order]
        if items.size > 1 and np.any(items[1:] == items[:-1]):
            raise ValueError("Itens repetidos na lista de respostas.")
        if values.size and not np.all(np.abs(values) == 1.0):
            raise ValueError("Respostas devem ser binárias (±1).")
        object.__setattr__(self, "items", _frozen_array(items, np.int64))
        object.__setattr__(self, "values", _frozen_array(values, np.float64))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[int, float]]) -> "AnswerList":
        pairs = list(pairs)
        if not pairs:
            return cls()
        items, values = zip(*pairs)
        return cls(np.array(items, dtype=np.int64), np.array(values, dtype=np.float64))

    def __len__(self) -> int:
        return int(self.items.size)

    def pairs(self) -> Iterator[Tuple[int, float]]:
        for i, v in zip(self.items, self.values):
            yield int(i), float(v)

    def restrict(self, allowed: Iterable[int]) -> "AnswerList":
        allowed = np.asarray(list(allowed), dtype=np.int64)
        mask = np.isin(self.items, allowed)
        return AnswerList(self.items[mask], self.values[mask])

    def without(self, item: int) -> "AnswerList":
        mask = self.items != item
        return AnswerList(self.items[mask], self.values[mask])

    def extend(self, other: "AnswerList") -> "AnswerList":
        return AnswerList(
            np.concatenate([self.items, other.items]),
            np.concatenate([self.values, other.values]),
        )


# ========== SPLIT ==========

@dataclass(frozen=True, eq=False)
class DatasetSplit:
    """
    Partição de usuários (≈50/25/25) e, para usuários de validação/teste,
    Answer Set e Evaluation Set disjuntos.
    """
    train_users: np.ndarray
    valid_users: np.ndarray
    test_users: np.ndarray
    seed: int
    answers: Dict[int, AnswerList] = field(default_factory=dict)
    evaluation: Dict[int, AnswerList] = field(default_factory=dict)
    answer_seed: Optional[int] = None

    def __post_init__(self):
        for name in ("train_users", "valid_users", "test_users"):
            arr = np.sort(np.asarray(getattr(self, name), dtype=np.int64))
            object.__setattr__(self, name, _frozen_array(arr, np.int64))

    @property
    def has_answers(self) -> bool:
        return self.answer_seed is not None

    @property
    def evaluation_users(self) -> np.ndarray:
        return np.sort(np.concatenate([self.valid_users, self.test_users]))

    def users_of(self, user_set) -> np.ndarray:
        user_set = UserSet(user_set)
        return self.valid_users if user_set == UserSet.valid else self.test_users

    def with_answers(
        self, answers: Dict[int, AnswerList], evaluation: Dict[int, AnswerList], answer_seed: int
    ) -> "DatasetSplit":
        return replace(self, answers=dict(answers), evaluation=dict(evaluation), answer_seed=answer_seed)


# ========== MODELOS ==========

@dataclass(frozen=True, eq=False)
class MfModel:
    """
    Fatoração de matrizes transdutiva: P (U×N) e Q (I×N).
    `fold_in` marca os usuários que fizeram parte do treino (com ou sem triplas).
    """
    P: np.ndarray
    Q: np.ndarray
    hyper: Hyperparams
    fold_in: np.ndarray
    user_ids: Optional[np.ndarray] = None
    item_ids: Optional[np.ndarray] = None

    @property
    def num_users(self) -> int:
        return int(self.P.shape[0])

    @property
    def num_items(self) -> int:
        return int(self.Q.shape[0])


@dataclass(frozen=True, eq=False)
class IamModel:
    """
    Modelo aditivo indutivo: itens q_i, representação padrão Ψ0, translações
    Ψ_i^{+1}/Ψ_i^{-1} e pesos α (todos 1 no modo warm).
    """
    Q: np.ndarray
    psi0: np.ndarray
    psi_pos: np.ndarray
    psi_neg: np.ndarray
    alpha: np.ndarray
    mode: ModelMode
    hyper: Hyperparams
    item_ids: Optional[np.ndarray] = None

    @property
    def num_items(self) -> int:
        return int(self.Q.shape[0])

    @property
    def latent_dim(self) -> int:
        return int(self.Q.shape[1])

    def check_item(self, item: int) -> None:
        if not 0 <= item < self.num_items:
            raise IndexRangeError(f"Item {item} fora de [0, {self.num_items}).")

    def translation(self, item: int, value: float) -> np.ndarray:
        self.check_item(item)
        return self.psi_pos[item] if value > 0 else self.psi_neg[item]


@dataclass(frozen=True, eq=False)
class ItemSimilarityMatrix:
    """
    Correlações de Pearson item-item esparsas (CSR, simétricas), guardadas só
    para pares co-avaliados fora da diagonal.
    - `support`: co-avaliações de todo par co-avaliado.
    - `sims`: correlação onde ela é definida; `defined` marca esses pares, já
      que uma correlação 0 continua definida.
    """
    sims: sparse.csr_matrix
    defined: sparse.csr_matrix
    support: sparse.csr_matrix

    @classmethod
    def from_pairs(cls, num_items: int, rows, cols, support, sims) -> "ItemSimilarityMatrix":
        """Pares i < j; sims NaN = indefinida. O triângulo inferior é o espelho."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        sims = np.asarray(sims, dtype=np.float64)
        ok = np.isfinite(sims)
        shape = (num_items, num_items)

        def mirror(r, c, v):
            return sparse.csr_matrix(
                (np.concatenate([v, v]), (np.concatenate([r, c]), np.concatenate([c, r]))), shape=shape
            )

        return cls(
            sims=mirror(rows[ok], cols[ok], sims[ok]),
            defined=mirror(rows[ok], cols[ok], np.ones(int(ok.sum()))),
            support=mirror(rows, cols, np.asarray(support, dtype=np.int64)),
        )

    @property
    def num_items(self) -> int:
        return int(self.support.shape[0])

    @property
    def num_defined(self) -> int:
        return int(self.defined.nnz // 2)

    def pairs(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(rows, cols, support, sims) dos pares co-avaliados i < j; NaN = indefinida."""
        upper = sparse.triu(self.support, k=1).tocoo()
        rows = upper.row.astype(np.int64)
        cols = upper.col.astype(np.int64)
        if rows.size == 0:
            return rows, cols, np.zeros(0, dtype=np.int64), np.zeros(0)
        values = np.asarray(self.sims[rows, cols], dtype=np.float64).ravel()
        mask = np.asarray(self.defined[rows, cols]).ravel() > 0
        return rows, cols, upper.data.astype(np.int64), np.where(mask, values, np.nan)

    def block(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        """Submatriz densa rows × cols, NaN onde a correlação é indefinida."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        values = self.sims[rows][:, cols].toarray()
        mask = self.defined[rows][:, cols].toarray() > 0
        return np.where(mask, values, np.nan)

    def to_dense(self) -> np.ndarray:
        items = np.arange(self.num_items)
        return self.block(items, items)


@dataclass(frozen=True, eq=False)
class ItemKnnModel:
    similarity: ItemSimilarityMatrix
    item_means: np.ndarray
    global_mean: float
    k: int
    item_ids: Optional[np.ndarray] = None

    @property
    def num_items(self) -> int:
        return self.similarity.num_items


__all__ = [
    "RatingTriple",
    "SparseRatings",
    "AnswerList",
    "DatasetSplit",
    "MfModel",
    "IamModel",
    "ItemSimilarityMatrix",
    "ItemKnnModel",
]
