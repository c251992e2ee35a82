"""yamabe-nodal - equivariant energy bounds for nodal Yamabe solutions on Sⁿ.

Modules:
    - sphere_geometry: points, distances, volumes, stereographic chart
    - symmetry_group: the signed groups Γ_m, orbits, assumption checks
    - criterion: μ_p, μ̂_p, the closed form a_{n,m} and the m_n thresholds
    - bubble_ansatz: concentrating bubbles and the signed superposition w_β
    - quadrature: zonal, bizonal, product-grid and Monte Carlo rules on Sⁿ
    - energy: norms, Nehari scaling, the Yamabe quotient and β-sweeps
    - claims / reporting / cli: the check-claims suite and file outputs

The continuous circle group Γ_∞ (e^{iϑ} together with τ) is not represented.
Since each Γ_m is a subgroup of it, c^{φ_m} ≤ c^{φ_∞} for every m.
"""

__version__ = "0.1.0"
