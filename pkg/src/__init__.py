"""
GFMM Mixed-Attribute Toolkit
General fuzzy min-max hyperbox classifiers for data with numeric and categorical features.
"""

__version__ = "1.0.0"
__author__ = "GFMM Toolkit Team"
__description__ = "Hyperbox classifiers, categorical encoders and benchmark experiments for mixed-attribute data"
