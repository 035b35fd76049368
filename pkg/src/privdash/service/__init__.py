"""Service layer: persistence, guided tour, HTTP API, CLI."""
