# coldstart_kode/app/services/interview_session.py

from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from ..core.exceptions import ModelModeError
from ..models.data_models import IamModel
from ..models.schemas import Interview, ModelMode
from ..utilities.helpers import stable_top_k
from ..utilities.logging_config import logger
from .iam_service import iam_predict_from_rep, iam_update

ANSWERS = {"like": 1.0, "l": 1.0, "dislike": -1.0, "d": -1.0, "skip": None, "s": None}


class InterviewSession:
    """
    Sessão de entrevista no terminal: pergunta os itens da entrevista, mostra
    recomendações e segue absorvendo avaliações (`like <id>`, `dislike <id>`,
    `undo`, `quit`). Entrada e saída são injetáveis para testes.
    """

    def __init__(
        self,
        model: IamModel,
        interview: Interview,
        top_k: int = 10,
        names: Optional[Dict[str, str]] = None,
        input_fn: Callable[[str], str] = input,
        output_fn: Callable[[str], None] = print,
        save_path: Optional[Union[str, Path]] = None,
    ):
        if model.mode == ModelMode.warm:
            raise ModelModeError("A sessão de entrevista requer modelo cold ou csw.")
        self.model = model
        self.interview = interview
        self.top_k = top_k
        self.names = names or {}
        self.input_fn = input_fn
        self.output_fn = output_fn
        self.save_path = save_path

        self.rep = model.psi0.copy()
        self.rated: Dict[int, float] = {}
        self.history: List[Tuple[np.ndarray, int]] = []
        self.last_recommendations: List[Tuple[int, float]] = []

        ids = model.item_ids if model.item_ids is not None else np.arange(model.num_items)
        self._ids = [str(i) for i in ids]
        self._index = {item_id: idx for idx, item_id in enumerate(self._ids)}

    # ---------- utilidades ----------

    def label(self, item: int) -> str:
        item_id = self._ids[item]
        name = self.names.get(item_id)
        return f"{name} ({item_id})" if name else item_id

    def _read(self, prompt: str) -> Optional[str]:
        try:
            return self.input_fn(prompt).strip()
        except EOFError:
            return None

    def _rate(self, item: int, value: float) -> None:
        self.history.append((self.rep, item))
        self.rep = iam_update(self.rep, self.model, item, value)
        self.rated[item] = value

    def undo(self) -> bool:
        if not self.history:
            return False
        self.rep, item = self.history.pop()
        self.rated.pop(item, None)
        return True

    # ---------- recomendações ----------

    def recommendations(self) -> List[Tuple[int, float]]:
        excluded = set(self.interview.items) | set(self.rated)
        candidates = np.array([i for i in range(self.model.num_items) if i not in excluded], dtype=np.int64)
        if candidates.size == 0:
            return []
        scores = iam_predict_from_rep(self.model, self.rep, candidates)
        top = stable_top_k(scores, min(self.top_k, candidates.size))
        return [(int(candidates[t]), float(scores[t])) for t in top]

    def show_recommendations(self) -> None:
        self.last_recommendations = self.recommendations()
        self.output_fn(f"🔹 Top {len(self.last_recommendations)} recomendações:")
        for rank, (item, score) in enumerate(self.last_recommendations, start=1):
            self.output_fn(f"  {rank:>2}. {self.label(item)}  score={score:+.4f}")

    # ---------- fluxo ----------

    def ask_interview(self) -> bool:
        """Pergunta cada item da entrevista. False se a entrada terminou (EOF)."""
        for position, item in enumerate(self.interview.items, start=1):
            while True:
                answer = self._read(f"[{position}/{self.interview.size}] {self.label(item)}: like/dislike/skip? ")
                if answer is None:
                    return False
                answer = answer.lower()
                if answer in ANSWERS:
                    break
                self.output_fn("⚠️ Responda like, dislike ou skip.")
            if ANSWERS[answer] is not None:
                self._rate(item, ANSWERS[answer])
        return True

    def handle_command(self, line: str) -> bool:
        """Processa um comando do laço pós-entrevista. False encerra a sessão."""
        parts = line.split()
        if not parts:
            return True
        command = parts[0].lower()
        if command == "quit":
            return False
        if command == "undo":
            if self.undo():
                self.show_recommendations()
            else:
                self.output_fn("⚠️ Nada para desfazer.")
            return True
        if command in ("like", "dislike") and len(parts) == 2:
            item = self._index.get(parts[1])
            if item is None:
                self.output_fn(f"⚠️ Item desconhecido: {parts[1]}")
                return True
            if item in self.rated:
                self.output_fn(f"⚠️ Item já avaliado: {parts[1]} (use undo)")
                return True
            self._rate(item, 1.0 if command == "like" else -1.0)
            self.show_recommendations()
            return True
        self.output_fn("⚠️ Comandos: like <id>, dislike <id>, undo, quit")
        return True

    def run(self) -> np.ndarray:
        logger.info(f"🚀 Sessão de entrevista com {self.interview.size} perguntas")
        if self.ask_interview():
            self.show_recommendations()
            while True:
                line = self._read("> ")
                if line is None or not self.handle_command(line):
                    break
        self.finish()
        return self.rep

    def finish(self) -> None:
        if self.save_path is not None:
            from ..database.text_exports import write_representation
            write_representation(self.rep, self.save_path)
            self.output_fn(f"✅ Representação salva em {self.save_path}")
        logger.info(f"✅ Sessão encerrada: {len(self.rated)} avaliações")


__all__ = ["InterviewSession", "ANSWERS"]
