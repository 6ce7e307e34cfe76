"""Quality assurance tests for Phase 9."""
