"""Component-wise few-shot CPU power modeling.

Typical flow::

    known, target, _ = firepower.synth(seed=3)
    kb = firepower.extract_knowledge(known)
    train, test = firepower.few_shot_split(target, firepower.choose_labeled_configs(target, 2, 1))
    model = firepower.build_target_model(kb, train)
    preds = model.predict_total(test)
"""

from ._core import (
    Dataset,
    FirePowerError,
    GeneralizationReport,
    KnowledgeBase,
    Model,
    build_target_model,
    choose_labeled_configs,
    default_spec_json,
    evaluate_generalization,
    extract_knowledge,
    few_shot_split,
    ideal_scaling_factor,
    load_dataset,
    load_knowledge,
    load_model,
    mape,
    methods,
    parse_dataset,
    parse_knowledge,
    parse_model,
    pearson_r,
    run_cli,
    run_experiment,
    synth,
)

__all__ = [
    "Dataset",
    "FirePowerError",
    "GeneralizationReport",
    "KnowledgeBase",
    "Model",
    "build_target_model",
    "choose_labeled_configs",
    "default_spec_json",
    "evaluate_generalization",
    "extract_knowledge",
    "few_shot_split",
    "ideal_scaling_factor",
    "load_dataset",
    "load_knowledge",
    "load_model",
    "mape",
    "methods",
    "parse_dataset",
    "parse_knowledge",
    "parse_model",
    "pearson_r",
    "run_cli",
    "run_experiment",
    "synth",
]
