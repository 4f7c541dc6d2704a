import math

import pytest

import firepower as fp


@pytest.fixture(scope="module")
def pair():
    known, target, truth = fp.synth(seed=3)
    return known, target, truth


def test_synth_shapes(pair):
    known, target, truth = pair
    assert len(known.config_ids) == 15
    assert len(target.config_ids) == 10
    assert known.n_samples == 15 * 8
    assert len(known.components) == 22
    assert known.fully_labeled
    assert '"components"' in truth


def test_synth_is_deterministic():
    a = fp.synth(seed=5)
    b = fp.synth(seed=5)
    assert a[0].to_json() == b[0].to_json()
    assert a[2] == b[2]


def test_dataset_round_trip(pair, tmp_path):
    known = pair[0]
    assert fp.parse_dataset(known.to_json()) == known
    known.save(tmp_path / "k.json")
    assert fp.load_dataset(tmp_path / "k.json") == known


def test_extract_and_importance(pair):
    kb = fp.extract_knowledge(pair[0])
    strategies = kb.strategies()
    assert len(strategies) == 22
    assert kb.retrain_count == 10
    assert strategies["RNU"] == "DecodeWidth"
    assert strategies["ROB"] is None
    imp = kb.importance("RNU")
    assert math.isclose(sum(imp.values()), 1.0, abs_tol=1e-12)
    assert imp["DecodeWidth"] > 0.95
    assert fp.parse_knowledge(kb.to_json()) == kb


def test_build_predict_and_metrics(pair):
    known, target, _ = pair
    kb = fp.extract_knowledge(known)
    train, test = fp.few_shot_split(target, fp.choose_labeled_configs(target, 3, 1))
    model = fp.build_target_model(kb, train)
    rows = model.predict(test)
    assert len(rows) == test.n_samples
    for row in rows[:5]:
        assert math.isclose(row["predicted"], sum(row["components"].values()), rel_tol=1e-12)
    preds = model.predict_total(test)
    labels = [r["label"] for r in rows]
    assert preds == [r["predicted"] for r in rows]
    err = fp.mape(preds, labels)
    assert 0.0 < err < 10.0
    assert fp.pearson_r(preds, labels) > 0.9
    assert fp.parse_model(model.to_json()) == model


def test_generalization_report(pair):
    known, target, _ = pair
    kb = fp.extract_knowledge(known)
    rep = fp.evaluate_generalization(kb, known)
    rows = rep.rows()
    assert len(rows) == 22
    assert all(r["verdict"] == "High" for r in rows)
    assert rep.low_components() == []
    assert rep.to_csv().startswith("component,scaling_factor,mape_percent,verdict\n")


def test_dissimilar_component_is_flagged():
    known, target, _ = fp.synth(seed=4, dissimilar=["ROB"])
    kb = fp.extract_knowledge(known)
    train, _ = fp.few_shot_split(target, fp.choose_labeled_configs(target, 4, 4))
    assert "ROB" in fp.evaluate_generalization(kb, train).low_components()


def test_run_experiment_rows(pair):
    known, target, _ = pair
    rows = fp.run_experiment(known, target, methods=["firepower", "mcpat_calib"], ks=[2], seeds=[1, 2])
    assert [(r["method"], r["seed"]) for r in rows] == [
        ("mcpat_calib", 1), ("mcpat_calib", 2), ("firepower", 1), ("firepower", 2)]
    assert len(fp.methods()) == 6


def test_scaling_factor_and_errors():
    assert fp.ideal_scaling_factor([1.0, 2.0], [2.0, 4.0]) == 2.0
    with pytest.raises(fp.FirePowerError):
        fp.mape([1.0], [0.0])
    with pytest.raises(fp.FirePowerError):
        fp.parse_dataset("{not json")
    with pytest.raises(fp.FirePowerError):
        fp.extract_knowledge(fp.synth(1)[0], n_estimators=0)


def test_cli_entry(tmp_path):
    code, out, _ = fp.run_cli(["synth", "--seed", "2", "--out-dir", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "known.json").exists()
    code, out, _ = fp.run_cli(["extract", "--known", str(tmp_path / "known.json"),
                               "--out", str(tmp_path / "kb.json")])
    assert code == 0 and "of 22 components use Retraining" in out
    assert fp.run_cli(["bogus"])[0] == 1
