import numpy as np


def grid(T, us):
    """A[j, n] = <T u_n, u_j> computed entry by entry (0-based)."""
    us = list(us)
    tus = [T.apply(u) for u in us]
    return np.array([[tus[n].inner(us[j]) for n in range(len(us))] for j in range(len(us))])
