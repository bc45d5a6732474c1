//! Verification suites and the experiments composed from them.

pub mod o11;
pub mod sl2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{Experiment, ExperimentConfig};
use super::output::Outcome;

/// Independent verification suites; each draws its sample points from its own
/// random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    /// Dilation-transform inversion.
    MellinInversion,
    /// Plancherel pairing.
    Plancherel,
    /// O(1,1) residue at zero.
    O11Residue,
    /// O(1,1) continuation.
    O11Continuation,
    /// Eigenvalues of `s` on circle modes.
    SModes,
    /// Weil-representation relations.
    WeilRelations,
    /// SL(2,ℝ) model resolvent.
    Sl2Model,
    /// Resonance scans.
    ResonanceScan,
    /// End-to-end SL(2,ℝ) check.
    Sl2Endtoend,
    /// Capelli identities.
    Capelli,
    /// K-type algebra.
    KTypes,
    /// Stable-range table.
    StableRange,
}

impl Suite {
    /// Runs the suite.
    pub fn run(self, cfg: &ExperimentConfig) -> Outcome {
        match self {
            Suite::MellinInversion => o11::mellin_inversion(cfg),
            Suite::Plancherel => o11::plancherel(cfg),
            Suite::O11Residue => o11::o11_residues(cfg),
            Suite::O11Continuation => o11::o11_continuation(cfg),
            Suite::SModes => o11::s_modes(cfg),
            Suite::WeilRelations => o11::weil_relations(cfg),
            Suite::Sl2Model => sl2::sl2_model(cfg),
            Suite::ResonanceScan => sl2::resonance_scan(cfg),
            Suite::Sl2Endtoend => sl2::sl2_endtoend(cfg),
            Suite::Capelli => {
                let mut out = o11::o11_capelli(cfg);
                out.extend(sl2::capelli_shift(cfg));
                out
            }
            Suite::KTypes => sl2::ktype_algebra(cfg),
            Suite::StableRange => sl2::stable_range(cfg),
        }
    }
}

/// Suites making up an experiment, in execution order.
pub fn suites(experiment: Experiment) -> &'static [Suite] {
    match experiment {
        Experiment::MellinCheck => &[Suite::MellinInversion, Suite::Plancherel],
        Experiment::O11Resonance => &[Suite::O11Residue, Suite::O11Continuation],
        Experiment::O11Rep => &[Suite::SModes],
        Experiment::WeilCheck => &[Suite::WeilRelations],
        Experiment::Sl2Model => &[Suite::Sl2Model],
        Experiment::Sl2Endtoend => &[Suite::Sl2Endtoend, Suite::KTypes],
        Experiment::CapelliCheck => &[Suite::Capelli, Suite::StableRange],
        Experiment::ResonanceScan => &[Suite::ResonanceScan],
    }
}

/// Runs every suite of the configured experiment.
pub fn run_experiment(cfg: &ExperimentConfig) -> Outcome {
    let mut out = Outcome::default();
    for suite in suites(cfg.experiment) {
        out.extend(suite.run(cfg));
    }
    out
}

/// Deterministic sample-point generator of `suite`.
pub fn sample_rng(seed: u64, suite: Suite) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(suite as u64);
    rng
}
