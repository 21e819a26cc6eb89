"""
TL1-regularized matrix completion toolkit
"""

__version__ = "1.0.0"
