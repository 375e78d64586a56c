"""Services orchestrating sieves, certificates and harnesses."""
