"""Data files: the grammar table, response templates, and sound catalog."""
