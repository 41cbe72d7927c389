"""Finite-gap KP-II solutions on a genus-4 M-curve and their soliton limit."""

__version__ = "0.1.0"


def clear_caches():
    """Drop memoized branch points, cycle bases and period data."""
    from . import curve, cycles, periods

    for fn in (curve._branch_lambdas, curve._branch_points_cached,
               cycles._build_cycles_cached, periods._period_table, periods._riemann_data):
        fn.cache_clear()
