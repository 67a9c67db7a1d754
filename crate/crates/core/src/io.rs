//! Solution, branch, and report serialization (placeholder).
