"""
Configuration package for the GFMM Mixed-Attribute Toolkit
Contains default settings and the experiment configuration model.
"""
