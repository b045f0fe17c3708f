"""
Quenched CLT toolkit - Markov operators, martingale approximation and Monte Carlo checks

Numerical companion for the functional CLT of stationary ergodic Markov chains
started at a point:
- Exact Markov-operator calculus on finite state spaces (Qf, f_m, g_f, Poisson solves)
- The martingale decomposition S_k = M_k^m + R_k^m with exact sigma_m^2
- Evaluators for the sufficient conditions and the inequalities behind them
- Reproducible quenched / annealed Monte Carlo ensembles
- A truncated rotation x Rademacher counterexample
"""

__version__ = "0.1.0"
