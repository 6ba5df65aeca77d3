from .errors import ExporterError
from .export import (
    ExportResult,
    ManifestRow,
    build_prompts,
    encode_images,
    encode_texts,
    export_anchors,
    export_images,
    load_clip,
    read_manifest,
)
from .templates import TEMPLATES, PromptTemplate, get_template

__all__ = [
    "ExporterError",
    "ExportResult",
    "ManifestRow",
    "PromptTemplate",
    "TEMPLATES",
    "build_prompts",
    "encode_images",
    "encode_texts",
    "export_anchors",
    "export_images",
    "get_template",
    "load_clip",
    "read_manifest",
]

__version__ = "0.1.0"
