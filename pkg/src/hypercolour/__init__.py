"""Phase analysis and exact oracles for counting hypergraph colourings
through a (q+1)-spin system on regular graphs."""

__version__ = "0.1.0"
