"""
Services: real-data evaluation protocol and prox oracle checks
"""
