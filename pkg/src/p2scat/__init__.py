"""p2scat - Exact scattering diagrams on the projective plane and refined DT invariants."""
