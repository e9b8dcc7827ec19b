"""Invariant search for rational second-order ODEs via Darboux polynomials and the S-function method."""
