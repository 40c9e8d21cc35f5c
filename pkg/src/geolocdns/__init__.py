"""Location-aware DNS service discovery.

Edge service areas travel as RFC 1876 LOC records next to the CNAME and A
records of a service name, so a client can pick the edge instance whose
area contains it (or fall back to a cloud instance) from a single DNS
response.
"""

__version__ = "0.1.0"
