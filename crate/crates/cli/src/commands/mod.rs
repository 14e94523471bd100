pub mod analyze;
pub mod eb;
pub mod examples;
pub mod szego;
pub mod verify;

/// Tally of one command run, used for the exit code.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Outcome {
    pub errors: usize,
    pub hard_fails: usize,
    pub statistical_fails: usize,
}

impl Outcome {
    pub fn merge(self, other: Outcome) -> Outcome {
        Outcome {
            errors: self.errors + other.errors,
            hard_fails: self.hard_fails + other.hard_fails,
            statistical_fails: self.statistical_fails + other.statistical_fails,
        }
    }
}

/// Independent per-cell seed: SplitMix64 finalizer of `base + index·φ`.
pub fn cell_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) fn error_text(e: &anyhow::Error) -> String {
    format!("{e:#}")
}
