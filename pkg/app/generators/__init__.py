from app.generators.mixture_generator import MixtureGenerator, generate_correlated_scalars, make_rng

__all__ = ["MixtureGenerator", "generate_correlated_scalars", "make_rng"]
