//! Case files, reports, corpora and global formulas.

pub mod case;
pub mod corpus;
pub mod formulas;
pub mod report;

pub use case::{CaseFile, HSpec, KappaSpec, Mode};
pub use corpus::{generate_cases, run_cases, run_corpus, CorpusSpec};
pub use formulas::{global_formulas, GlobalFormulas};
pub use report::{run_case, CaseReport};
