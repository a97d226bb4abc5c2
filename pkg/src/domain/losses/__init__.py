"""
Ranking loss domain module.
Contains the smooth rank and the differentiable NDCG / AP / R@k losses plus BPR.
"""
