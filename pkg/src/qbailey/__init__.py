"""Exact q-series engine and verifier for a family of Bailey-pair identities."""
