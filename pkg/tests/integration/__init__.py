"""End-to-end tests of the qclt command line."""
