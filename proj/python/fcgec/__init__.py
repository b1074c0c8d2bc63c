"""Operation-level corrections: apply, derive, normalize, STG labels, scoring."""

import json

from . import _fcgec
from ._fcgec import FcgecError, attention_scores, exhaustive_beam_width, f_half

__all__ = [
    "FcgecError",
    "apply_reference",
    "attention_scores",
    "beam_decode",
    "corpus_stats",
    "decode_stg",
    "derive_operations",
    "encode_stg",
    "evaluate",
    "exhaustive_beam_width",
    "extract_edits",
    "f_half",
    "normalize_reference",
    "op_count",
    "validate_reference",
]

FcgecError.code = property(lambda self: self.args[0])
FcgecError.field_path = property(lambda self: self.args[2])
FcgecError.__str__ = lambda self: f"{self.args[0]}: {self.args[1]}"


def _dump(reference):
    if isinstance(reference, str):
        return reference
    return json.dumps(reference, ensure_ascii=False, separators=(",", ":"))


def apply_reference(sentence, reference):
    return _fcgec.apply_reference(sentence, _dump(reference))


def validate_reference(sentence, reference, strict=False):
    return [
        {"kind": kind, "field_path": path, "message": message}
        for kind, path, message in _fcgec.validate_reference(sentence, _dump(reference), strict)
    ]


def op_count(reference):
    return _fcgec.op_count(_dump(reference))


def derive_operations(source, target):
    return json.loads(_fcgec.derive_operations(source, target))


def normalize_reference(sentence, reference):
    return json.loads(_fcgec.normalize_reference(sentence, _dump(reference)))


def encode_stg(sentence, reference, t_max=6):
    record = json.loads(_fcgec.encode_stg(sentence, _dump(reference), t_max))
    return {key: record[key] for key in ("first", "next", "tags", "fills")}


def decode_stg(sentence, labels):
    return _fcgec.decode_stg(sentence, json.dumps(labels, ensure_ascii=False))


def beam_decode(scores, beam=5):
    order, score = _fcgec.beam_decode(scores, beam)
    return list(order), score


def extract_edits(source, target):
    return [
        {"kind": kind, "begin": begin, "end": end, "replacement": text}
        for kind, begin, end, text in _fcgec.extract_edits(source, target)
    ]


def evaluate(source, hypothesis, references):
    return _fcgec.evaluate(source, hypothesis, [_dump(r) for r in references])


def corpus_stats(files, dedupe=False, per_reference=False):
    if isinstance(files, str):
        files = [files]
    return json.loads(_fcgec.corpus_stats([str(f) for f in files], dedupe, per_reference))
