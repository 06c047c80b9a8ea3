//! Holds the workspace acceptance suite (`tests/acceptance.rs`); the
//! package is listed last so the rest of the workspace is tested first.
