//! The two-user example: binary sources, a 36x4 channel assembled from six
//! 6x4 blocks, and two class distributions per user.

use crate::error::{Error, Result};
use crate::model::{ClassPolicy, InputDistribution, MacChannel, SourceSpec, SystemModel};

/// Name under which the example is addressable from the command line.
pub const FIXTURE_NAME: &str = "paper-example";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExampleParams {
    pub k1: f64,
    pub k2: f64,
    /// Probability of the first symbol of source 1.
    pub p1: f64,
    /// Probability of the first symbol of source 2.
    pub p2: f64,
}

impl Default for ExampleParams {
    fn default() -> Self {
        ExampleParams {
            k1: 0.056,
            k2: 0.01,
            p1: 0.028,
            p2: 0.01155,
        }
    }
}

impl ExampleParams {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, name, value, expected| {
            if ok {
                Ok(())
            } else {
                Err(Error::Domain {
                    name,
                    value,
                    expected,
                })
            }
        };
        check(
            (0.0..=1.0 / 3.0).contains(&self.k1),
            "k1",
            self.k1,
            "0 <= 3 k1 <= 1",
        )?;
        check(
            (0.0..=0.5).contains(&self.k2),
            "k2",
            self.k2,
            "0 <= k2 <= 0.5",
        )?;
        check(self.p1 > 0.0 && self.p1 < 1.0, "p1", self.p1, "0 < p1 < 1")?;
        check(self.p2 > 0.0 && self.p2 < 1.0, "p2", self.p2, "0 < p2 < 1")
    }
}

/// The base 6x4 block, row-major.
pub fn build_w1(params: &ExampleParams) -> Result<[[f64; 4]; 6]> {
    params.validate()?;
    let (k1, k2) = (params.k1, params.k2);
    let mut w = [[0.0; 4]; 6];
    for (r, row) in w.iter_mut().take(4).enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = if c == r { 1.0 - 3.0 * k1 } else { k1 };
        }
    }
    w[4] = [0.5 - k2, 0.5 - k2, k2, k2];
    w[5] = [k2, k2, 0.5 - k2, 0.5 - k2];
    Ok(w)
}

/// Row of `W1` used at position `x1` (0-based) of block `x2` (0-based).
fn block_row(x2: usize, x1: usize) -> usize {
    const PERMS: [[usize; 6]; 3] = [[1, 2, 3, 0, 5, 4], [2, 3, 0, 1, 4, 5], [3, 0, 1, 2, 5, 4]];
    match x2 {
        0 => x1,
        1 => 4,
        2 => 5,
        _ => PERMS[x2 - 3][x1],
    }
}

pub fn build_paper_channel(params: &ExampleParams) -> Result<MacChannel> {
    let w1 = build_w1(params)?;
    let mut w = Vec::with_capacity(36 * 4);
    for x2 in 0..6 {
        for x1 in 0..6 {
            w.extend_from_slice(&w1[block_row(x2, x1)]);
        }
    }
    MacChannel::new(6, 6, 4, w)
}

pub fn build_paper_model_with(params: &ExampleParams) -> Result<SystemModel> {
    let channel = build_paper_channel(params)?;
    let q1 = InputDistribution::new(vec![0.0, 0.0, 0.0, 0.0, 0.5, 0.5])?;
    let q2 = InputDistribution::new(vec![0.25, 0.25, 0.25, 0.25, 0.0, 0.0])?;
    SystemModel {
        source1: SourceSpec::new(vec![params.p1, 1.0 - params.p1])?,
        source2: SourceSpec::new(vec![params.p2, 1.0 - params.p2])?,
        channel,
        policy: ClassPolicy {
            q: [[q1.clone(), q2.clone()], [q1, q2]],
            gamma: None,
        },
    }
    .validated()
}

pub fn build_paper_model() -> SystemModel {
    build_paper_model_with(&ExampleParams::default()).expect("default example parameters are valid")
}

/// Built-in model by name.
pub fn fixture(name: &str) -> Option<SystemModel> {
    (name == FIXTURE_NAME).then(build_paper_model)
}
