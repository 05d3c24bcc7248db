"""
Utilities package for the GFMM Mixed-Attribute Toolkit
Contains the key-value file reader and the encoding inspector.
"""
