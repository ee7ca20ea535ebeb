"""Configuration parsing and file output for the command-line front end."""
