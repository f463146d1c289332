"""isopoly: exact optimization over the graph isomorphism polytopes ψn, ψn,n and φn."""
