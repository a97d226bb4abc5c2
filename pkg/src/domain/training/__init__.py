"""
Training domain module.
Contains run configuration, batch construction, the training step and early stopping.
"""
