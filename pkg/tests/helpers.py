import numpy as np

from mmimmo.geometry import CarrierConfig

LAMBDA = CarrierConfig().wavelength


def random_channel(rng, n, m=None):
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
