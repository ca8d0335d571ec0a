"""
Run the feature-parameter sweeps and print the findings.
"""

from experiments.feature_sweep import main

if __name__ == "__main__":
    main()
