//! Built-in experiment grids mirroring the three result tables at reduced size.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::config::{ExperimentConfig, ProblemSpec, SolverSpec, DEFAULT_ETA, DEFAULT_MAX_ITER};

const DEMO_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
const DEMO_PHILLIPS_N: usize = 256;
const DEMO_IMAGE_SIDE: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemoTable {
    /// GMRES/QMR with and without range restriction on Phillips.
    Solvers,
    /// QMR with shifts 0 to 3 on Phillips.
    QmrShifts,
    /// Image deblurring.
    Deblurring,
}

impl DemoTable {
    pub const ALL: [DemoTable; 3] = [
        DemoTable::Solvers,
        DemoTable::QmrShifts,
        DemoTable::Deblurring,
    ];

    pub fn number(self) -> u8 {
        match self {
            DemoTable::Solvers => 1,
            DemoTable::QmrShifts => 2,
            DemoTable::Deblurring => 3,
        }
    }
}

impl fmt::Display for DemoTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "table{}", self.number())
    }
}

impl FromStr for DemoTable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "1" | "table1" => Ok(DemoTable::Solvers),
            "2" | "table2" => Ok(DemoTable::QmrShifts),
            "3" | "table3" => Ok(DemoTable::Deblurring),
            other => Err(format!("unknown demo table {other:?} (expected 1, 2 or 3)")),
        }
    }
}

/// Configuration for one demo table, writing into `<output_root>/tableN`.
pub fn demo_config(table: DemoTable, output_root: &Path) -> ExperimentConfig {
    let (problem, solvers, noise) = match table {
        DemoTable::Solvers => (
            ProblemSpec::phillips(DEMO_PHILLIPS_N),
            vec![
                SolverSpec::new("gmres", &[]),
                SolverSpec::new("rrqmr", &[1, 2]),
                SolverSpec::new("qmr", &[]),
                SolverSpec::new("rrgmres", &[1, 2]),
            ],
            vec![0.1, 0.5, 1.0],
        ),
        DemoTable::QmrShifts => (
            ProblemSpec::phillips(DEMO_PHILLIPS_N),
            vec![
                SolverSpec::new("qmr", &[]),
                SolverSpec::new("rrqmr", &[1, 2, 3]),
            ],
            vec![0.5, 1.0, 5.0],
        ),
        DemoTable::Deblurring => (
            ProblemSpec {
                name: "blur2d".into(),
                n: DEMO_IMAGE_SIDE,
                band: None,
                sigma: None,
            },
            vec![
                SolverSpec::new("gmres", &[]),
                SolverSpec::new("rrqmr", &[1]),
                SolverSpec::new("qmr", &[]),
                SolverSpec::new("rrgmres", &[1]),
            ],
            vec![0.5, 1.0, 5.0],
        ),
    };
    ExperimentConfig {
        problem,
        solvers,
        noise_levels_percent: noise,
        assumed_noise_levels_percent: None,
        seeds: DEMO_SEEDS.to_vec(),
        eta: DEFAULT_ETA,
        max_iter: DEFAULT_MAX_ITER,
        output_dir: output_root.join(table.to_string()),
    }
}
