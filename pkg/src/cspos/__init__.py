"""POS tagging for code-switched text: combined and integrated tagger conditions."""

__version__ = "0.1.0"
