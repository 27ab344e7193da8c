"""
Solver engine: numerics, kernels, the spectral solver, bounds, trade-off search and evaluation heads.

Import submodules directly (``from app.engine.solver import solve``); the
package itself re-exports nothing so the models package can depend on
``app.engine.kernels`` without a cycle.
"""
