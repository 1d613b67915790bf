# Errors, environment helpers and JSON serialization
