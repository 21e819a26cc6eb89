"""
Evaluation package: metrics, hyperparameter tuning and benchmark campaigns
"""
