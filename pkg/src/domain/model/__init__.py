"""
Graph model domain module.
Contains the bipartite graph, embedding tables, LightGCN-style propagation and the optimizer.
"""
