"""
Settings and configuration for the GFMM Mixed-Attribute Toolkit
"""

# Application Settings
APP_CONFIG = {
    "app_name": "GFMM Mixed-Attribute Toolkit",
    "version": "1.0.0",
    "supported_file_types": {
        "data": [".csv"],
        "schema": [".schema"],
        "config": [".cfg", ".conf", ".txt"],
        "model": [".gfmm"]
    }
}

# Logging Settings
LOGGING_CONFIG = {
    "log_file": "gfmm_toolkit.log",
    "level": "INFO",
    "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
}

# Hyperbox learner defaults
GFMM_CONFIG = {
    "theta_grid": [0.1, 0.7, 1.0],
    "gamma": 1.0,                    # sensitivity of the ramp function
    "sigma": 0.0,                    # minimum similarity for agglomerative merging
    "similarity": "longest",         # longest | shortest | midpoint
    "tie_break": "deterministic",    # deterministic | seeded-random
    "numeric_algorithms": ["onln", "iol", "agglo-sm", "agglo-2"],
    "size_tolerance": 1e-12
}

# Mixed-attribute learner defaults
MIXED_CONFIG = {
    "eta_grid": [0.1, 0.7, 1.0],
    "beta_fractions": [0.25, 0.5, 0.75]
}

# Categorical encoder defaults
ENCODER_CONFIG = {
    "kinds": ["label", "onehot", "sum", "helmert", "target", "jamesstein", "loo", "catboost"],
    "target.m": 1.0,                 # minimum samples for a reliable category estimate
    "target.z": 1.0,                 # smoothing of the prior/posterior transition
    "catboost.z": 1.0                # prior weight
}

# Cross-validation protocol
CV_CONFIG = {
    "k": 4,
    "repeats": 10,
    "seed": 0
}

# Ripley-style two-class synthetic data
SYNTHETIC_CONFIG = {
    "component_means": {
        0: [[-0.3, 0.7], [0.4, 0.7]],
        1: [[-0.7, 0.3], [0.3, 0.3]]
    },
    "variance": 0.03,
    "train_per_class": 125,
    "test_per_class": 500,
    "categorical_domains": {
        "synthetic-1": ["One", "Two"],
        "synthetic-2": ["One", "Two", "Three", "Four", "Five",
                        "Six", "Seven", "Eight", "Nine", "Ten"]
    },
    "numeric_names": ["x1", "x2"],
    "categorical_name": "c1",
    "class_column": "class"
}

# GFMM + decision tree stacking
HYBRID_CONFIG = {
    "schemes": ["A", "B"],
    "tree_max_depth": 10,
    "bases": ["iol", "onln", "agglo-2"],
    "seed": 0
}

# Statistical comparison
STATS_CONFIG = {
    "alpha": 0.05,
    "supported_alphas": [0.05, 0.10]
}

# Report output
REPORT_CONFIG = {
    "folds_file": "folds.csv",
    "summary_file": "summary.csv",
    "summary_json": "summary.json",
    "ranks_file": "ranks.csv",
    "workbook_file": "results.xlsx",
    "comparison_file": "comparison.csv",
    "checks_file": "checks.json",
    "models_dir": "models",
    "diagram_prefix": "cd",
    "float_format": "%.10g",
    "skip_marker": "-",
    "xlsx": False,
    "save_models": False
}

# Tolerance bands used when comparing against published results
REPRODUCE_CONFIG = {
    "cba_tolerance": 0.05,
    "cba_pass_share": 0.8,
    "box_tolerance": {"iol": 0.10, "default": 0.20},
    "secondary_tolerance": 0.15,
    "reference_file": "data/reference/published_results.csv",
    "small_datasets": ["zoo", "heart", "tae", "post-operative"],
    "band_encoders": ["target", "jamesstein", "label", "onehot"],
    "band_algorithms": ["iol", "onln", "agglo-2"]
}

# Benchmark datasets (UCI). Shapes as published; files are fetched offline.
UCI_BASE = "https://archive.ics.uci.edu/ml/machine-learning-databases"

DATASET_CATALOG = {
    "abalone": {"samples": 4177, "classes": 28, "numeric": 7, "categorical": 1,
                "source": f"{UCI_BASE}/abalone/abalone.data"},
    "australian": {"samples": 690, "classes": 2, "numeric": 6, "categorical": 8,
                   "source": f"{UCI_BASE}/statlog/australian/australian.dat"},
    "cmc": {"samples": 1473, "classes": 3, "numeric": 2, "categorical": 7,
            "source": f"{UCI_BASE}/cmc/cmc.data"},
    "dermatology": {"samples": 358, "classes": 6, "numeric": 1, "categorical": 33,
                    "source": f"{UCI_BASE}/dermatology/dermatology.data"},
    "flag": {"samples": 194, "classes": 8, "numeric": 10, "categorical": 18,
             "source": f"{UCI_BASE}/flags/flag.data"},
    "german": {"samples": 1000, "classes": 2, "numeric": 7, "categorical": 13,
               "source": f"{UCI_BASE}/statlog/german/german.data"},
    "heart": {"samples": 270, "classes": 2, "numeric": 7, "categorical": 6,
              "source": f"{UCI_BASE}/statlog/heart/heart.dat"},
    "japanese-credit": {"samples": 653, "classes": 2, "numeric": 6, "categorical": 9,
                        "source": f"{UCI_BASE}/credit-screening/crx.data"},
    "molecular-biology": {"samples": 3190, "classes": 3, "numeric": 0, "categorical": 60,
                          "source": f"{UCI_BASE}/molecular-biology/splice-junction-gene-sequences/splice.data"},
    "nursery": {"samples": 12960, "classes": 5, "numeric": 0, "categorical": 8,
                "source": f"{UCI_BASE}/nursery/nursery.data"},
    "post-operative": {"samples": 87, "classes": 3, "numeric": 1, "categorical": 7,
                       "source": f"{UCI_BASE}/postoperative-patient-data/post-operative.data"},
    "tae": {"samples": 151, "classes": 3, "numeric": 1, "categorical": 4,
            "source": f"{UCI_BASE}/tae/tae.data"},
    "tic-tac-toe": {"samples": 958, "classes": 2, "numeric": 0, "categorical": 9,
                    "source": f"{UCI_BASE}/tic-tac-toe/tic-tac-toe.data"},
    "zoo": {"samples": 101, "classes": 7, "numeric": 1, "categorical": 15,
            "source": f"{UCI_BASE}/zoo/zoo.data"}
}

SYNTHETIC_DATASETS = ["synthetic-1", "synthetic-2"]

# Default locations relative to the repository root
PATHS = {
    "data_dir": "data/datasets",
    "schema_dir": "data/schemas",
    "output_dir": "results"
}
