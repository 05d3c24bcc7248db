"""
Core package for the GFMM Mixed-Attribute Toolkit
Contains data handling, encoders, hyperbox learners, statistics and experiments.
"""
