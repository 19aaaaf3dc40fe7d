"""Bundled sound clips and their id-to-file index."""
