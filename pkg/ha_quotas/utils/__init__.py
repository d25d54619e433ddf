"""Text formats for instances, matchings, X3C and roommates files."""
