//! Decimation algorithms: UCP, BPGD, the exact-marginal decimation process,
//! their coupling under shared free bits, and toxic-cycle detection.

pub mod bpgd;
pub mod decimation;
pub mod toxic;
pub mod trace;
pub mod ucp;

use rand::Rng;

pub use bpgd::{compare_traces, run_bpgd, run_bpgd_strict, run_bpgd_with, BpgdMode, BpgdRun, TraceMismatch};
pub use decimation::{coupled_run, run_decimation, run_decimation_with, CoupledRun, DecimationRun};
pub use toxic::{binary_cycles, find_toxic_cycles, is_toxic, Cycle};
pub use trace::{trajectory_snapshots, Outcome, Snapshot, StepKind, TrialTrace};
pub use ucp::{run_ucp, run_ucp_graph, run_ucp_with, QueueOrder, UcpOptions};

use crate::rng::{self, Purpose};

/// The free-choice bits `τ` shared by coupled runs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SharedBits(pub Vec<bool>);

impl SharedBits {
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        SharedBits((0..n).map(|_| rng.gen()).collect())
    }

    /// Bits for trial `index` under a master seed.
    pub fn derived(n: usize, seed: u64, index: u64) -> Self {
        SharedBits::random(n, &mut rng::stream(seed, Purpose::SharedBits, index))
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }
}
