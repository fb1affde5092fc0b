import json

import pytest

import chatda


def test_gini_and_metrics():
    assert chatda.gini([3, 1]) == pytest.approx(0.375)
    r = chatda.evaluate(["inappropriate", "inappropriate", "neutral", "appropriate"],
                        ["inappropriate", "neutral", "neutral", "appropriate"])
    assert r["accuracy"] == pytest.approx(0.75)
    assert r["weighted_f1"] == pytest.approx(0.75)  # (2*2/3 + 2/3 + 1) / 4
    assert chatda.cohen_kappa(["inappropriate", "inappropriate", "neutral", "neutral"],
                              ["inappropriate", "neutral", "inappropriate", "neutral"]) == pytest.approx(0.0)


def test_mapping():
    assert chatda.map_user_da("ad", "relevant", "after-statement") == "user-request"
    assert chatda.map_user_da("ad", "relevant", "after-question") == "user-command"


def test_generate_annotate_train_detect():
    corpus = chatda.generate_corpus(60, 3, 0.15)
    lines = corpus.strip().split("\n")
    assert len(lines) == 60
    first = json.loads(lines[0])
    assert first["id"].startswith("gen-3-")

    annotated = chatda.annotate(corpus, relabel=True)
    assert chatda.annotate(annotated) == annotated

    out = chatda.train(corpus, seed=3, grid="none")
    assert json.loads(out["model"])["format_version"] == 1
    report = chatda.evaluate_model(out["model"], out["test"])
    assert 0.0 <= report["accuracy"] <= 1.0
    text, flagged, total = chatda.detect(out["model"], out["test"], "json")
    assert json.loads(text)["summary"]["flagged"] == flagged
    assert flagged <= total


def test_errors():
    with pytest.raises(chatda.DataError):
        chatda.gini([0, 0, 0])
    code, _, err = chatda.main(["annotate", "--in", "/nonexistent/file.jsonl"])
    assert code == 2 and "error" in err
    code, _, _ = chatda.main(["bogus"])
    assert code == 1
