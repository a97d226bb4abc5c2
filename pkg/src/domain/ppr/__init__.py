"""
Personalized PageRank domain module.
Contains offline PPR computation and the softmax-weighted negative samplers.
"""
