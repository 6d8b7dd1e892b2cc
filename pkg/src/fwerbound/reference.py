"""Published reference values used by the verification suite."""

# (n, alpha) -> {rho: (estimated FWER at 10^4 replications, printed bound)}
REFERENCE_ESTIMATES = {
    (10, 0.3): {0.1: (0.2132, 0.2156), 0.3: (0.2053, 0.2087), 0.5: (0.1688, 0.1965),
                0.7: (0.1242, 0.1875), 0.9: (0.0733, 0.1785)},
    (100, 0.05): {0.1: (0.0456, 0.0475), 0.3: (0.0355, 0.0474), 0.5: (0.0265, 0.0462),
                  0.7: (0.0153, 0.0457), 0.9: (0.0005, 0.0452)},
    (500, 0.05): {0.1: (0.0451, 0.0475), 0.3: (0.0319, 0.0475), 0.5: (0.0198, 0.0471),
                  0.7: (0.0081, 0.0469), 0.9: (0.0028, 0.0467)},
}

# printed Bonferroni cutoffs for the rows above
REFERENCE_CUTOFFS = {(10, 0.3): 1.8808, (100, 0.05): 3.2905, (500, 0.05): 3.7190}


def reference_cells():
    """``(n, alpha, rho, estimate, printed_bound)`` for every published cell."""
    for (n, alpha), row in REFERENCE_ESTIMATES.items():
        for rho, (est, bound) in row.items():
            yield n, alpha, rho, est, bound
