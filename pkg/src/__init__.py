"""
pGCL Analysis Toolkit

Packages:
    pgcl        - program syntax, parser and small-step semantics
    analysis    - partial-sum explorer, finite-chain solver, sampler
    reductions  - stepper compiler and reduction gadgets
    cli         - command-line entry point
"""
