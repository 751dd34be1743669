"""Bridge from pretrained masked language models to audit-ready files.

Two exports feed the ``cscprobe`` toolkit:

    export.export_embeddings   input-embedding row per character -> CEMB file
    export.export_predictions  masked + in-place passes per record -> JSONL

Everything runs on the frozen checkpoint; there is no fine-tuning here.
"""

__version__ = "0.1.0"
