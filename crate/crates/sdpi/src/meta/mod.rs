//! Randomized checks of the metatheory: preservation, progress, the
//! embedding's typing, compositionality and operational correspondence, and
//! the equality laws.

pub mod gen;
mod suites;

pub use suites::{correspond, worked_example, K};

use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    SubjectReductionTerms,
    SubjectReductionProcs,
    Progress,
    EmbedTyping,
    EmbedCompositionality,
    EmbedCorrespondence,
    EqualityLaws,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::SubjectReductionTerms,
        Suite::SubjectReductionProcs,
        Suite::Progress,
        Suite::EmbedTyping,
        Suite::EmbedCompositionality,
        Suite::EmbedCorrespondence,
        Suite::EqualityLaws,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::SubjectReductionTerms => "subject-reduction-terms",
            Suite::SubjectReductionProcs => "subject-reduction-procs",
            Suite::Progress => "progress",
            Suite::EmbedTyping => "embed-typing",
            Suite::EmbedCompositionality => "embed-compositionality",
            Suite::EmbedCorrespondence => "embed-correspondence",
            Suite::EqualityLaws => "equality-laws",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What one generated case came to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail {
        counterexample: String,
        reason: String,
    },
    Undecided(String),
    /// The generator produced something the checker rejects, or nothing.
    Skip,
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub case: usize,
    pub counterexample: String,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub iters: usize,
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub undecided: usize,
    pub skipped: usize,
    pub failures: Vec<Failure>,
}

impl Report {
    /// Cases that produced a verdict either way.
    pub fn decided(&self) -> usize {
        self.passed + self.failed
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite      {}", self.suite)?;
        writeln!(f, "iters      {}  (seed {})", self.iters, self.seed)?;
        writeln!(f, "passed     {}", self.passed)?;
        writeln!(f, "failed     {}", self.failed)?;
        writeln!(f, "undecided  {}", self.undecided)?;
        writeln!(f, "skipped    {}", self.skipped)?;
        for x in &self.failures {
            writeln!(f, "case {}: {}", x.case, x.reason)?;
            writeln!(f, "    {}", x.counterexample)?;
        }
        Ok(())
    }
}

/// Runs `iters` cases of `suite`; case `i` is generated from `seed` and `i`
/// alone, so any single case can be replayed.
pub fn run_suite(suite: Suite, iters: usize, seed: u64) -> Report {
    let mut r = Report {
        suite,
        iters,
        seed,
        passed: 0,
        failed: 0,
        undecided: 0,
        skipped: 0,
        failures: vec![],
    };
    for i in 0..iters {
        let case_seed = seed
            .wrapping_mul(0x9e37_79b9_7f4a_7c15)
            .wrapping_add(i as u64);
        match suites::run_case(suite, case_seed) {
            Outcome::Pass => r.passed += 1,
            Outcome::Skip => r.skipped += 1,
            Outcome::Undecided(_) => r.undecided += 1,
            Outcome::Fail {
                counterexample,
                reason,
            } => {
                r.failed += 1;
                r.failures.push(Failure {
                    case: i,
                    counterexample,
                    reason,
                });
            }
        }
    }
    r
}
