"""Test package for dpcausal."""
