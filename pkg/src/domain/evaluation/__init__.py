"""
Evaluation domain module.
Contains the all-ranking protocol and the exact ranking metrics.
"""
