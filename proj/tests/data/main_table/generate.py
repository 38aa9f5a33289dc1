"""Builds per-record fixtures whose aggregates match the published GPT-4o row
for the Spanish culture, English prompts (overall 490/560)."""
import json
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent
SCHEMA = HERE.parents[2] / "data" / "schema" / "culturescope_schema.json"

# (category id, n, correct)
ROWS = [
    ("category.geography_customs", 60, 51),
    ("category.personal_choices_habits", 276, 240),
    ("category.regulation_policy", 100, 84),
    ("category.social_relationship_and_structures", 48, 45),
    ("category.values_and_beliefs", 76, 70),
]
TYPES = ["FACTUAL", "CONCEPTUAL", "MISLEADING", "MULTI_HOP"]
FORMATS = {"FACTUAL": ["MULTIPLE_CHOICE", "TRUE_FALSE", "SHORT_ANSWER"],
           "CONCEPTUAL": ["MULTIPLE_CHOICE", "TRUE_FALSE"],
           "MISLEADING": ["MULTIPLE_CHOICE", "TRUE_FALSE"],
           "MULTI_HOP": ["MULTIPLE_CHOICE", "SHORT_ANSWER", "ESSAY"]}


def main():
    nodes = json.loads(SCHEMA.read_text())["nodes"]
    parent = {n["id"]: n["parent"] for n in nodes}
    dims_by_cat = {}
    for n in nodes:
        if n["level"] == "DIMENSION":
            dims_by_cat.setdefault(parent[parent[n["id"]]], []).append(n["id"])
    rng = random.Random(4242)
    items, records = [], []
    serial = 0
    for cat, n, correct in ROWS:
        flags = [True] * correct + [False] * (n - correct)
        rng.shuffle(flags)
        dims = dims_by_cat[cat]
        for i, ok in enumerate(flags):
            serial += 1
            ctype = TYPES[serial % 4]
            fmt = FORMATS[ctype][serial % len(FORMATS[ctype])]
            item_id = f"fx{serial:04d}"
            item = {"item_id": item_id, "culture": "Spanish", "language": "en", "content_type": ctype,
                    "format": fmt, "question_text": f"Fixture question {serial}", "options": [],
                    "reference_answer": "true", "knowledge_ids": [f"kb{serial:04d}"],
                    "dimension_id": dims[i % len(dims)], "qc_status": "VERIFIED"}
            if fmt == "MULTIPLE_CHOICE":
                item["options"] = [{"label": l, "text": f"option {l}"} for l in "ABCD"]
                item["reference_answer"] = "B"
            elif fmt in ("SHORT_ANSWER", "ESSAY"):
                item["reference_answer"] = "reference text"
            items.append(item)
            judge = fmt in ("SHORT_ANSWER", "ESSAY")
            records.append({"item_id": item_id, "correct": ok,
                            "grading_mode": "JUDGE" if judge else "OBJECTIVE_MATCH",
                            "parse_ok": True, "raw_text": "", "parsed_answer": ""})
    with open(HERE / "items.jsonl", "w") as f:
        for it in items:
            f.write(json.dumps(it, sort_keys=True, ensure_ascii=False) + "\n")
    with open(HERE / "records.jsonl", "w") as f:
        for r in records:
            f.write(json.dumps(r, sort_keys=True) + "\n")
    (HERE / "expected.json").write_text(json.dumps({
        "model": "gpt-4o", "language": "en",
        "cells": ["en", "0.875", "0.850", "0.870", "0.840", "0.938", "0.921"]}, indent=2) + "\n")


if __name__ == "__main__":
    main()
