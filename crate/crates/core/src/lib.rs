//! Mining and classification of refactoring documentation.
//!
//! The pipeline: ingest commits and detected refactorings ([`corpus`]),
//! normalize commit messages ([`textprep`]), featurize them with TF-IDF
//! n-grams ([`features`]), classify them into refactoring motivations
//! ([`classify`]), scan them for self-affirmed refactoring phrases
//! ([`sarpatterns`]) with rank-based significance tests ([`stats`]), split
//! changed files into production and JUnit test code ([`testdetect`]), and
//! aggregate everything into tables and figures ([`report`]).
//!
//! [`pipeline`] chains preprocessing, featurization and model selection into
//! one call; [`synthetic`] generates labeled corpora for end-to-end checks.

pub mod corpus;
pub mod textprep;
pub mod classify;
pub mod features;
pub mod stats;
pub mod sarpatterns;
pub mod testdetect;
pub mod report;
pub mod synthetic;
pub mod pipeline;
