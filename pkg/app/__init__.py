# Spectral adversarial representation learning
