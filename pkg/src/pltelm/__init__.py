"""Progressive learning of new classes with an online-sequential ELM."""
