"""cspi: exact coherent-state path integrals through dualization."""
