# coldstart_kode/app/database/text_exports.py

from pathlib import Path
from typing import Dict, Iterable, List, Optional, Union

import numpy as np
import pandas as pd

from ..core.exceptions import DatasetParseError
from ..models.data_models import AnswerList, DatasetSplit, SparseRatings
from ..models.schemas import Interview, InterviewSource, MetricsReport
from ..utilities.logging_config import logger

PathLike = Union[str, Path]
MANIFEST_TITLE = "# coldstart-kode split manifest"


def _prepare(path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


# ========== TABELAS ==========

def write_table(frame: pd.DataFrame, path: PathLike, append: bool = False) -> Path:
    """TSV com cabeçalho; em modo append o cabeçalho só sai no arquivo novo."""
    path = _prepare(path)
    exists = append and path.is_file() and path.stat().st_size > 0
    frame.to_csv(path, sep="\t", index=False, mode="a" if exists else "w", header=not exists)
    return path


def metrics_frame(reports: Iterable[MetricsReport]) -> pd.DataFrame:
    rows = []
    for report in reports:
        row = report.model_dump(exclude={"config", "seeds"})
        row["seeds"] = ",".join(str(s) for s in report.seeds)
        if report.config is not None:
            row.update(report.config.model_dump(exclude={"seed"}))
        rows.append(row)
    return pd.DataFrame(rows)


def write_metrics(reports: Iterable[MetricsReport], path: PathLike, append: bool = True) -> Path:
    """Uma linha por (método, dataset, #Q, semente), pronta para plotar curvas."""
    path = write_table(metrics_frame(reports), path, append=append)
    logger.info(f"✅ Métricas gravadas em {path}")
    return path


# ========== MAPAS DE IDS ==========

def write_id_maps(data: SparseRatings, directory: PathLike) -> Dict[str, Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    out = {}
    for name, ids in (("users", data.user_ids), ("items", data.item_ids)):
        if ids is None:
            continue
        frame = pd.DataFrame({"index": np.arange(len(ids)), "id": ids})
        out[name] = write_table(frame, directory / f"{name}.tsv")
    logger.info(f"🔹 Mapas de ids gravados em {directory}")
    return out


def write_ratings(data: SparseRatings, path: PathLike) -> Path:
    """Avaliações normalizadas: id original, rating bruto e valor binário."""
    users = data.user_ids[data.users] if data.user_ids is not None else data.users
    items = data.item_ids[data.items] if data.item_ids is not None else data.items
    frame = pd.DataFrame({"user": users, "item": items, "raw": data.raw, "value": data.values})
    return write_table(frame, path)


def read_names(path: PathLike, separator: str = "\t") -> Dict[str, str]:
    """Mapa opcional `itemId<sep>título` para listagens legíveis."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Arquivo de nomes não encontrado: {path}")
    names: Dict[str, str] = {}
    for number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split(separator, 1)
        if len(parts) != 2:
            raise DatasetParseError("esperado itemId<sep>título", number)
        names[parts[0].strip()] = parts[1].strip()
    return names


# ========== MANIFESTO DE SPLIT ==========

def _join(values: Iterable) -> str:
    return ",".join(str(int(v)) for v in values)


def _answers_line(kind: str, user: int, answers: AnswerList) -> str:
    body = ",".join(f"{i}:{int(v):+d}" for i, v in answers.pairs())
    return f"{kind}\t{user}\t{body}"


def write_split_manifest(split: DatasetSplit, data: SparseRatings, path: PathLike) -> Path:
    """
    Manifesto textual e determinístico do split: usuários por conjunto e,
    se houver, Answer/Evaluation Sets por usuário (índices densos).
    """
    lines = [
        MANIFEST_TITLE,
        f"dataset\t{data.num_users}\t{data.num_items}\t{len(data)}",
        f"seed\t{split.seed}",
        f"answer_seed\t{'' if split.answer_seed is None else split.answer_seed}",
        f"train\t{_join(split.train_users)}",
        f"valid\t{_join(split.valid_users)}",
        f"test\t{_join(split.test_users)}",
    ]
    for user in sorted(split.answers):
        lines.append(_answers_line("answers", user, split.answers[user]))
    for user in sorted(split.evaluation):
        lines.append(_answers_line("evaluation", user, split.evaluation[user]))

    path = _prepare(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info(f"✅ Manifesto de split gravado em {path}")
    return path


def _parse_ints(text: str) -> np.ndarray:
    return np.array([int(v) for v in text.split(",") if v], dtype=np.int64)


def _parse_answers(text: str) -> AnswerList:
    pairs = []
    for chunk in filter(None, text.split(",")):
        item, value = chunk.split(":")
        pairs.append((int(item), float(value)))
    return AnswerList.from_pairs(pairs)


def read_split_manifest(path: PathLike, data: Optional[SparseRatings] = None) -> DatasetSplit:
    """Lê o manifesto; se `data` vier, confere que é o mesmo dataset."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Manifesto de split não encontrado: {path}")

    fields: Dict[str, str] = {}
    answers: Dict[int, AnswerList] = {}
    evaluation: Dict[int, AnswerList] = {}
    for number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        try:
            if parts[0] in ("answers", "evaluation"):
                target = answers if parts[0] == "answers" else evaluation
                target[int(parts[1])] = _parse_answers(parts[2] if len(parts) > 2 else "")
            else:
                fields[parts[0]] = "\t".join(parts[1:])
        except (ValueError, IndexError) as e:
            raise DatasetParseError(f"manifesto inválido: {e}", number) from e

    missing = {"dataset", "seed", "train", "valid", "test"} - set(fields)
    if missing:
        raise DatasetParseError(f"manifesto sem campos: {sorted(missing)}")

    if data is not None:
        expected = f"{data.num_users}\t{data.num_items}\t{len(data)}"
        if fields["dataset"] != expected:
            raise DatasetParseError(
                f"manifesto gerado para outro dataset ({fields['dataset']!r} ≠ {expected!r})", 2
            )

    split = DatasetSplit(
        train_users=_parse_ints(fields["train"]),
        valid_users=_parse_ints(fields["valid"]),
        test_users=_parse_ints(fields["test"]),
        seed=int(fields["seed"]),
    )
    answer_seed = fields.get("answer_seed", "")
    if answer_seed:
        split = split.with_answers(answers, evaluation, int(answer_seed))
    return split


# ========== ENTREVISTA ==========

def write_interview(
    interview: Interview,
    path: PathLike,
    item_ids: Optional[np.ndarray] = None,
    names: Optional[Dict[str, str]] = None,
) -> Path:
    """Lista ordenada: posição, id original, α (se houver) e título (se houver)."""
    rows = []
    for rank, item in enumerate(interview.items, start=1):
        item_id = str(item_ids[item]) if item_ids is not None else str(item)
        rows.append({
            "rank": rank,
            "itemId": item_id,
            "alpha": interview.weights[rank - 1] if interview.weights is not None else np.nan,
            "name": (names or {}).get(item_id, ""),
        })
    frame = pd.DataFrame(rows, columns=["rank", "itemId", "alpha", "name"])
    path = write_table(frame, path)
    logger.info(f"✅ Entrevista ({interview.source.value}, #Q={interview.size}) gravada em {path}")
    return path


def read_interview(path: PathLike, item_ids: Optional[np.ndarray] = None) -> Interview:
    """Lê uma lista de entrevista (ids originais → índices densos)."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Arquivo de entrevista não encontrado: {path}")
    frame = pd.read_csv(path, sep="\t", dtype={"itemId": str}, keep_default_na=False)
    if "itemId" not in frame.columns:
        raise DatasetParseError("coluna itemId ausente na entrevista", 1)
    index = {str(v): i for i, v in enumerate(item_ids)} if item_ids is not None else None
    items: List[int] = []
    for number, item_id in enumerate(frame["itemId"], start=2):
        if index is None:
            items.append(int(item_id))
        elif item_id in index:
            items.append(index[item_id])
        else:
            raise DatasetParseError(f"item desconhecido na entrevista: {item_id}", number)
    return Interview(items=tuple(items), source=InterviewSource.manual)


# ========== REPRESENTAÇÃO ==========

def write_representation(rep: np.ndarray, path: PathLike) -> Path:
    path = _prepare(path)
    np.savetxt(path, np.asarray(rep, dtype=np.float64), fmt="%.17g")
    return path


__all__ = [
    "write_table",
    "metrics_frame",
    "write_metrics",
    "write_id_maps",
    "write_ratings",
    "read_names",
    "write_split_manifest",
    "read_split_manifest",
    "write_interview",
    "read_interview",
    "write_representation",
]
