"""Phone-number spam campaigner detection.

The package builds campaigns from a phone-anchored tweet corpus, scores users
with hierarchical meta-path scores over per-campaign trees, and couples
per-campaign one-class classifiers through a feedback loop that exchanges
newly labeled spammers between overlapping campaigns.
"""

__version__ = "0.1.0"
