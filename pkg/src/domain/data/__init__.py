"""
Interaction data domain module.
Contains datasets, implicit-feedback filtering and the two split protocols.
"""
