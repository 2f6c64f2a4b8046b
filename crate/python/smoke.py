"""Smoke test for the beingsel extension module."""

import math
import sys
import tempfile

import beingsel


def main():
    probs = beingsel.roulette_probabilities([169.0, 576.0, 64.0, 361.0])
    assert [round(p, 2) for p in probs] == [0.14, 0.49, 0.05, 0.31], probs

    o1, o2 = beingsel.one_point_crossover("01101", "11000", 4)
    assert (o1, o2) == ("11001", "01100"), (o1, o2)

    assert beingsel.class_code(5) == [0.0, 1.0, 0.0, 1.0]
    assert math.isclose(beingsel.sigmoid(0.0), 0.5)

    best, rows = beingsel.run_onemax(bits=40, population=40, generations=60, seed=1)
    assert len(rows) == 60 and best.count("1") >= 36, best

    corpus = beingsel.Corpus.synthetic(seed=1, classes=4, variants=3)
    assert (corpus.n_classes, corpus.n_variants, len(corpus)) == (4, 3, 12)
    pure = corpus.pure_beings()
    assert len(pure) == 3 and all(b.is_pure(corpus) for b in pure)

    a, b, kind = pure[0].crossover(pure[1], 256)
    assert kind == "boundary" and a.is_pure(corpus) and b.is_pure(corpus)
    _, _, kind = pure[0].crossover(pure[1], 300)
    assert kind == ("in_chromosome", 1, 44), kind

    net = beingsel.Network(seed=0)
    out = net.forward([0.0] * 256)
    assert len(out) == 4 and all(0.0 < y < 1.0 for y in out)

    hist = beingsel.run_selection(corpus, seed=2, generations=3)
    rows = hist.rows
    assert len(rows) == 3 and rows[0][3]
    assert all(r1[1] <= r0[1] for r0, r1 in zip(rows, rows[1:]))
    with tempfile.TemporaryDirectory() as d:
        hist.export(d)
        again = beingsel.Being.load(d + "/best_being")
        assert again == hist.best_being

    try:
        beingsel.Corpus.load("/nonexistent/corpus")
    except IOError:
        pass
    else:
        raise AssertionError("expected IOError")

    print("smoke ok: best_error=%.4f" % hist.best_error)
    return 0


if __name__ == "__main__":
    sys.exit(main())
