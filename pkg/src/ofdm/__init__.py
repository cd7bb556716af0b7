"""Crest-factor analysis of BPSK OFDM codes: synthesis, amplifier models, codes, metrics and bounds."""
