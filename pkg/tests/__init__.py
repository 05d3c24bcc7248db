"""
Test package for the GFMM Mixed-Attribute Toolkit
"""
