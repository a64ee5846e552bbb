"""Smoke test for the motif extension: generate, score, rank, render, evaluate."""

import json
import sys
import tempfile

import motif


def main() -> int:
    assert motif.canonical("Move Up and Down two times") == "make vertical oscillations 2 times"
    assert motif.parse("move upward")["steps"]

    ep = motif.generate("vertical-shaking", json.dumps({"frequency": 2}))
    assert motif.discriminate(ep, "move up and down 2 times")["label"] == 1
    assert motif.discriminate(ep, "make a circular motion clockwise")["label"] == 0

    circle = motif.generate("circle", json.dumps({"radius": 0.3}))
    ranked = motif.rank([ep, circle], "make a circular motion clockwise")
    assert ranked[0][0] == 1, ranked

    with tempfile.TemporaryDirectory() as d:
        path = motif.render(circle, d)
        with open(path, "rb") as f:
            assert f.read(8) == b"\x89PNG\r\n\x1a\n"

    m = motif.evaluate([1, 1, 0, 1], [1, 0, 0, 0])
    assert abs(m["precision"] - 1 / 3) < 1e-12 and m["recall"] == 1.0
    assert motif.evaluate([0, 0], [0, 0])["precision"] is None

    trace = motif.refine("sprinkle", "move to the left while making vertical oscillations")
    assert trace["reason"] == "accepted", trace["reason"]

    assert len(motif.corpus(5, seed=3)) == 5
    try:
        motif.canonical("move sideways")
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")

    print("smoke ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
