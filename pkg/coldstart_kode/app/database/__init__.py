# coldstart_kode/app/database/__init__.py

# ========== CONTÊINER BINÁRIO DE MODELOS ==========
from .model_store import (
    ArraySpec,
    ModelFileHeader,
    load_model,
    read_header,
    save_model,
)

# ========== EXPORTAÇÕES TEXTUAIS ==========
from .text_exports import (
    metrics_frame,
    read_interview,
    read_names,
    read_split_manifest,
    write_id_maps,
    write_interview,
    write_metrics,
    write_ratings,
    write_representation,
    write_split_manifest,
    write_table,
)

__all__ = [
    "ArraySpec",
    "ModelFileHeader",
    "load_model",
    "read_header",
    "save_model",
    "metrics_frame",
    "read_interview",
    "read_names",
    "read_split_manifest",
    "write_id_maps",
    "write_interview",
    "write_metrics",
    "write_ratings",
    "write_representation",
    "write_split_manifest",
    "write_table",
]
