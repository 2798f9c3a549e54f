"""Numerical laboratory for quantized Hamiltonian dynamics on the sphere.

Submodules:

- ``siegel``: pointwise geometry of compatible linear complex structures
- ``unitary_metric``: Finsler distances on U(N) and its universal cover
- ``sphere``: prequantized sphere, quadrature, Calabi, path products
- ``hamiltonians``: closed-form Hamiltonian presets
- ``flow``: Hamiltonian flows, tangent maps, complex-structure transport
- ``quantize``: holomorphic sections and quantized operators
- ``propagate``: unitary propagation with a determinant-phase lift
- ``invariants``: scalar curvature, disc-area quasimorphism, defect
- ``harness`` / ``cli``: experiment sweeps, reports, command line
"""

__version__ = "0.1.0"
