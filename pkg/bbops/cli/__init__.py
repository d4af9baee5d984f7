# CLI module for bbops
