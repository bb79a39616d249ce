"""Desk-scale generalized functions of quasianalytic class."""
