"""Toolkit for probing glyph/phonetic knowledge in Chinese character embeddings
and for leakage-audited evaluation of Chinese spell-checking corpora.

Submodules:
    chars       character decomposition, pinyin and vocabulary tables
    datasets    balanced, character-disjoint probe dataset construction
    embeddings  frozen embedding tables and their binary file format
    probe       MLP binary probe: forward, Adam training, gradient checks
    coverage    misspelled-character coverage ratio and guess baseline
    isolation   train/test correction-pair overlap removal and statistics
    metrics     sentence-level detection/correction precision, recall, F1
    cli         command-line entry point with run manifests
"""

__version__ = "0.1.0"
