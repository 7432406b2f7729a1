"""Published limiting constants for uniform random mappings.

``FLAJOLET_ODLYZKO`` is ``lim E(mu_n) / n``; ``TREE_CONSTANTS[s]`` is
``lim E(tau_{n,s}) / n``; ``CONDITIONAL_LIMITS[s]`` is their ratio.
"""

FLAJOLET_ODLYZKO = 0.7578230112

TREE_CONSTANTS = {
    1: 0.4834983471,
    2: 0.1599870930,
    3: 0.0821020328,
    4: 0.0505788011,
}

CONDITIONAL_LIMITS = {
    1: 0.6380095879,
    2: 0.2111140604,
    3: 0.1083393241,
    4: 0.0667422345,
}
