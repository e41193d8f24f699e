"""Builds the tiny interchange artifact used by the Rust test suite.

The artifact has the same layout the trainer exports (model.onnx,
tokenizer.json, label_map.json, metadata.json) but holds a small random
bag-of-embeddings classifier instead of a fine-tuned transformer.
parity.json stores logits computed natively in torch for a few sentences,
so the Rust ONNX path can be checked against an independent runtime.

Usage: python3 scripts/make_tiny_artifact.py crates/core/tests/fixtures/tiny_artifact
"""
import json
import sys
from pathlib import Path

import torch
from tokenizers import Tokenizer, models, pre_tokenizers, processors

MAX_LENGTH = 16
LABELS = ["Happy", "Fear", "Sadness", "Disgust", "Surprise", "Anger"]
WORDS = """mutlu sevinç harika güzel korku korkuyorum endişe tehlike üzgün üzüntü
ağladım yazık iğrenç tiksindim rezalet şaşırdım inanılmaz vay öfke kızgın
nefret sessiz istila suriyeliler göç bugün çok bir ve bu da (kullanıcı)
(retweetlemek) ( ) . , ! ? …""".split()
PIECES = ["##lar", "##ler", "##ım", "##im", "##dı", "##di", "##i", "##a", "##e"]
SENTENCES = [
    "bugün çok mutlu ve güzel",
    "korkuyorum , tehlike var !",
    "çok üzgün ağladım",
    "iğrenç bir rezalet",
    "vay inanılmaz , şaşırdım",
    "öfke ve nefret",
    "(retweetlemek) sessiz istila …",
    "bilinmeyen kelimeler burada",
]


def main(out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    vocab = {t: i for i, t in enumerate(["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"] + WORDS + PIECES)}
    tok = Tokenizer(models.WordPiece(vocab, unk_token="[UNK]"))
    tok.pre_tokenizer = pre_tokenizers.BertPreTokenizer()
    tok.post_processor = processors.TemplateProcessing(
        single="[CLS] $A [SEP]",
        special_tokens=[("[CLS]", vocab["[CLS]"]), ("[SEP]", vocab["[SEP]"])],
    )
    tok.enable_truncation(MAX_LENGTH)
    tok.enable_padding(length=MAX_LENGTH, pad_id=vocab["[PAD]"], pad_token="[PAD]")
    tok.save(str(out / "tokenizer.json"))

    torch.manual_seed(20220526)

    class TinyClassifier(torch.nn.Module):
        def __init__(self, vocab_size: int) -> None:
            super().__init__()
            self.embed = torch.nn.Embedding(vocab_size, 12)
            self.type_embed = torch.nn.Embedding(2, 12)
            self.head = torch.nn.Linear(12, len(LABELS))

        def forward(self, input_ids, attention_mask, token_type_ids):
            h = torch.tanh(self.embed(input_ids) + self.type_embed(token_type_ids))
            m = attention_mask.unsqueeze(-1).to(h.dtype)
            pooled = (h * m).sum(1) / m.sum(1).clamp(min=1.0)
            return self.head(pooled) * 4.0

    model = TinyClassifier(len(vocab)).eval()

    def encode(text):
        enc = tok.encode(text)
        as_tensor = lambda xs: torch.tensor([xs], dtype=torch.int64)
        return as_tensor(enc.ids), as_tensor(enc.attention_mask), as_tensor(enc.type_ids)

    example = encode(SENTENCES[0])
    torch.onnx.export(
        model,
        example,
        str(out / "model.onnx"),
        input_names=["input_ids", "attention_mask", "token_type_ids"],
        output_names=["logits"],
        opset_version=14,
        dynamo=False,
    )

    parity = []
    with torch.no_grad():
        for s in SENTENCES:
            parity.append({"text": s, "logits": [round(float(v), 7) for v in model(*encode(s))[0]]})
    (out / "parity.json").write_text(json.dumps(parity, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")
    (out / "label_map.json").write_text(
        json.dumps({name: i for i, name in enumerate(LABELS)}, indent=1) + "\n", encoding="utf-8"
    )
    (out / "metadata.json").write_text(
        json.dumps(
            {"name": "tiny-bag-of-embeddings", "version": "1", "base_model": "none (test fixture)", "max_length": MAX_LENGTH},
            indent=1,
        )
        + "\n",
        encoding="utf-8",
    )


if __name__ == "__main__":
    main(Path(sys.argv[1]))
