# Consensus Game Package
