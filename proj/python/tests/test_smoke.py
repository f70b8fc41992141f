import json
import math

import pytest

import radctl

WORKED = {
    "report_id": "w",
    "findings": "",
    "indication": "",
    "sentences": [
        {"index": 0, "text": "The mediastinum is mildly enlarged.", "regions": ["mediastinum"]},
        {"index": 1, "text": "Blunting of right costophrenic angle noted.", "regions": ["right lung"]},
        {"index": 2, "text": "No suspicious nodules seen.", "regions": ["left lung", "right lung"]},
        {"index": 3, "text": "No pneumothorax or infective consolidation.", "regions": ["left lung", "right lung"]},
        {"index": 4, "text": "Bilateral atelectasis, likely post-operative.", "regions": ["left lung", "right lung"]},
        {"index": 5, "text": "Degenerative changes seen in both shoulders.", "regions": ["left clavicle", "right clavicle"]},
        {"index": 6, "text": "NG tube tip positioned correctly in stomach.", "regions": ["abdomen"]},
        {"index": 7, "text": "No free air under diaphragm.", "regions": ["abdomen"]},
    ],
}


def test_sections_and_sentences():
    assert radctl.parse_report_sections("INDICATION: cough. FINDINGS: Lungs clear.") == ("Lungs clear.", "cough.")
    assert radctl.split_sentences("No pneumothorax. No effusion.") == ["No pneumothorax.", "No effusion."]
    with pytest.raises(radctl.RadctlError, match="MissingFindings"):
        radctl.parse_report_sections("IMPRESSION: none")


def test_partition_and_sampling():
    part = radctl.find_valid_subsets(WORKED)
    assert [sorted(s["regions"]) for s in part["subsets"]] == [
        ["mediastinum"],
        ["left lung", "right lung"],
        ["left clavicle", "right clavicle"],
        ["abdomen"],
    ]
    ok, diagnostics = radctl.validate_partition(WORKED, part)
    assert ok and diagnostics == []
    a = radctl.sample_dropout(part, 3)
    assert a == radctl.sample_dropout(part, 3)
    assert radctl.sample_dropout(part, 3, full_report_probability=1.0)["full_report"]


def test_fusion_identity_of_zero_params():
    params = radctl.random_params(2, 9)
    y0 = radctl.mlp_forward(params, [0.0] * 4)
    x, z = [0.5, -1.0, 0.25, 2.0], [1.0, 1.0, -0.5, 0.0]
    fx, fz = radctl.mlp_forward(params, x), radctl.mlp_forward(params, z)
    fxz = radctl.mlp_forward(params, [a + b for a, b in zip(x, z)])
    for i in range(4):
        assert math.isclose(fxz[i] - y0[i], (fx[i] - y0[i]) + (fz[i] - y0[i]), abs_tol=1e-9)
    with pytest.raises(radctl.RadctlError, match="ShapeMismatch"):
        radctl.mlp_forward(params, [1.0])


def test_metrics():
    assert radctl.bleu("a b c", "a b d", 1) == pytest.approx(2 / 3)
    assert radctl.rouge_l("a b c d", "a c d") == pytest.approx(6 / 7)
    assert radctl.meteor("no acute process", "no acute process") == pytest.approx(1.0)
    assert radctl.collapse("uncertain") and not radctl.collapse("no_mention")
    ce = radctl.ce_metrics([{"A": "positive", "B": "negative"}], [{"A": "positive", "B": "positive"}])
    assert (ce["tp"], ce["fp"], ce["fn"]) == (1, 1, 0)
    assert ce["f1"] == pytest.approx(2 / 3)
    assert radctl.label_findings("No pleural effusion.")["pleural_effusion"] == "negative"


def test_end_to_end(tmp_path):
    files = radctl.synth(tmp_path / "in", seed=2, patients=4, token_dim=4)
    sidecar = json.loads(open(files["sidecar"]).read())
    settings = dict(
        reports=files["reports"],
        annotations=files["annotations"],
        metadata=files["metadata"],
        tokens=files["tokens"],
        token_dim=4,
        seed=2,
        output_dir=tmp_path / "out",
    )
    m1 = radctl.run_pipeline(**settings)
    m2 = radctl.run_pipeline(**settings)
    assert m1["counts"]["partial_eval_instances"] == sidecar["totals"]["sum_k"]
    m1.pop("created_at")
    m2.pop("created_at")
    assert m1 == m2
    with pytest.raises(radctl.RadctlError, match="InvalidConfig"):
        radctl.run_pipeline(nonsense=1)
