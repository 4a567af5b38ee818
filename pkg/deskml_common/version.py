"""
Version information for deskml
"""
DESKML_VERSION = "0.3.0"

# Wire protocol version announced in Join messages
PROTOCOL_VERSION = 1
