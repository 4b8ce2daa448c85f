"""Hypergeometric summation: Gosper, Zeilberger and WZ certificates."""
