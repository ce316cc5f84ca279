#!/usr/bin/env python3
"""Regenerate the shared wire-protocol conformance fixtures.

Writes tests/data/protocol/model.json (a small trained weight dump) and
transcripts.jsonl (request/response pairs produced by the reference
implementation). Any scorer server claiming protocol conformance must
reproduce these responses: exact JSON equality, floats to 1e-9, error
values compared by presence only (message text is implementation-defined).
"""

import json
from pathlib import Path

from codeswitch.model import TrainConfig, train
from codeswitch.protocol import handle_request
from codeswitch.toygen import ToySpec, generate_toy

OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "protocol"


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    toy = generate_toy(ToySpec(n_train=40, n_test=10, seed=7))
    model = train(TrainConfig(epochs=12, seed=7), toy.train.pivot)
    model.save(OUT / "model.json")

    test_utts = list(toy.test.pivot)[:4]
    requests = [
        {
            "op": "loss_batch",
            "items": [
                {"tokens": list(u.tokens), "slots": list(u.slots), "intent": u.intent}
                for u in test_utts
            ],
        },
        # out-of-vocabulary tokens and an extended I- continuation label
        {
            "op": "loss_batch",
            "items": [
                {
                    "tokens": ["book", "una", "zotel", "in", "belmar"],
                    "slots": ["O", "O", "O", "O", "B-hotel_city"],
                    "intent": "book_hotel",
                },
                {
                    "tokens": ["play", "songs", "by", "mira", "volan"],
                    "slots": ["O", "O", "O", "B-artist", "I-artist"],
                    "intent": "play_music",
                },
            ],
        },
        {"op": "loss_batch", "items": []},
        {
            "op": "predict_batch",
            "items": [{"tokens": list(u.tokens)} for u in test_utts],
        },
        {"op": "predict_batch", "items": [{"tokens": ["qqq", "zzz"]}]},
        {"op": "predict_batch", "items": []},
        # errors: unknown op, unknown gold intent, malformed item
        {"op": "noop"},
        {
            "op": "loss_batch",
            "items": [{"tokens": ["hi"], "slots": ["O"], "intent": "no_such_intent"}],
        },
        {"op": "loss_batch", "items": [{"tokens": ["hi"]}]},
    ]

    with open(OUT / "transcripts.jsonl", "w", encoding="utf-8") as f:
        for request in requests:
            response = handle_request(model, request)
            f.write(
                json.dumps({"request": request, "response": response}, ensure_ascii=False)
                + "\n"
            )
    print(f"wrote {OUT / 'model.json'} and {len(requests)} transcript entries")


if __name__ == "__main__":
    main()
