"""
Utilities: linear algebra, file I/O and process fan-out
"""
