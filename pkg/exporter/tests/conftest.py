"""Shared fixture: a tiny randomly initialized masked LM saved to disk.

Nothing downloads; the checkpoint is built locally from a fixed torch seed,
so probability expectations are stable across runs and machines with the
same library versions. The vocabulary is 5 special tokens plus a run of
common characters.
"""

import pytest

MODEL_CHARS = "的一是不了人我在有他这中大来上国个到说们为子和你地出道也时年得就那要下以生会自着去"

SPECIALS = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]


@pytest.fixture(scope="session")
def model_chars():
    return MODEL_CHARS


@pytest.fixture(scope="session")
def model_dir(tmp_path_factory):
    torch = pytest.importorskip("torch")
    transformers = pytest.importorskip("transformers")
    from transformers import BertConfig, BertForMaskedLM, BertTokenizer

    assert len(set(MODEL_CHARS)) == len(MODEL_CHARS)
    root = tmp_path_factory.mktemp("tiny_mlm")
    vocab_file = root / "vocab.txt"
    vocab_file.write_text("\n".join(SPECIALS + list(MODEL_CHARS)) + "\n", encoding="utf-8")

    config = BertConfig(
        vocab_size=len(SPECIALS) + len(MODEL_CHARS),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=48,
    )
    torch.manual_seed(0)
    model = BertForMaskedLM(config)
    model.eval()
    out = root / "model"
    model.save_pretrained(out)
    # positional path argument works on both the vocab_file and vocab spellings
    BertTokenizer(str(vocab_file)).save_pretrained(out)
    return out
