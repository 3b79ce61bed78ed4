"""
Command-line front end of gbv.
"""
