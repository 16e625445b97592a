//! Validated domain types: sources, the two-input channel, class policies.
//!
//! All types are plain data. Constructors (`new`) validate and return
//! [`Error`]; [`SystemModel::validate`] reports every violation without
//! failing so that hand-built or partially broken models can be inspected.

use std::fmt;

use log::warn;

use crate::error::{Error, Result};

/// Absolute tolerance on probability sums.
pub const PROB_TOL: f64 = 1e-12;

/// One of the two transmitting users.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum User {
    One,
    Two,
}

impl User {
    pub const BOTH: [User; 2] = [User::One, User::Two];

    pub fn other(self) -> User {
        match self {
            User::One => User::Two,
            User::Two => User::One,
        }
    }

    pub fn index(self) -> usize {
        match self {
            User::One => 0,
            User::Two => 1,
        }
    }

    pub fn number(self) -> usize {
        self.index() + 1
    }
}

/// Message class: `One` holds the high-probability messages (`P^n(u) >= gamma^n`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    One,
    Two,
}

impl Class {
    pub const ALL: [Class; 2] = [Class::One, Class::Two];

    pub fn index(self) -> usize {
        match self {
            Class::One => 0,
            Class::Two => 1,
        }
    }

    pub fn number(self) -> usize {
        self.index() + 1
    }

    pub fn from_number(n: usize) -> Option<Class> {
        match n {
            1 => Some(Class::One),
            2 => Some(Class::Two),
            _ => None,
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Memoryless source law on its support.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpec {
    pub probs: Vec<f64>,
}

impl SourceSpec {
    /// Validates the law and drops zero-probability symbols.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_distribution("source", 1, &probs)?;
        let dropped = probs.iter().filter(|&&p| p == 0.0).count();
        if dropped > 0 {
            warn!("dropping {dropped} zero-probability source symbol(s) from the support");
        }
        let probs: Vec<f64> = probs.into_iter().filter(|&p| p > 0.0).collect();
        if probs.len() < 2 {
            return Err(Error::Dimension(format!(
                "source support has {} symbol(s); at least 2 are required",
                probs.len()
            )));
        }
        Ok(SourceSpec { probs })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn min_prob(&self) -> f64 {
        self.probs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_prob(&self) -> f64 {
        self.probs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        -self
            .probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.ln())
            .sum::<f64>()
    }

    fn violations(&self, field: &str, out: &mut Vec<Violation>) {
        let before = out.len();
        distribution_violations(field, &self.probs, out);
        let support = self.probs.iter().filter(|&&p| p > 0.0).count();
        // a support count is meaningless once entries are already invalid
        if out.len() == before && support < 2 {
            out.push(Violation::new(
                format!("{field}.support"),
                format!("support has {support} symbol(s), need at least 2"),
                support as f64,
            ));
        }
    }
}

/// Channel input distribution over one user's alphabet. Zeros are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct InputDistribution {
    pub probs: Vec<f64>,
}

impl InputDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_distribution("input distribution", 1, &probs)?;
        Ok(InputDistribution { probs })
    }

    pub fn uniform(n: usize) -> Self {
        InputDistribution {
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn point_mass(n: usize, at: usize) -> Self {
        let mut probs = vec![0.0; n];
        probs[at] = 1.0;
        InputDistribution { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Transition law `W(y | x1, x2)`.
///
/// Rows are stored in the order `x1 + n1 * x2` (0-based, `x1` fastest), each
/// row holding `ny` output probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct MacChannel {
    pub n1: usize,
    pub n2: usize,
    pub ny: usize,
    pub w: Vec<f64>,
}

impl MacChannel {
    pub fn new(n1: usize, n2: usize, ny: usize, w: Vec<f64>) -> Result<Self> {
        if n1 == 0 || n2 == 0 || ny == 0 {
            return Err(Error::Dimension(format!(
                "channel alphabets must be nonempty (got {n1}, {n2}, {ny})"
            )));
        }
        if w.len() != n1 * n2 * ny {
            return Err(Error::Dimension(format!(
                "channel table has {} entries, expected {}x{}x{} = {}",
                w.len(),
                n1,
                n2,
                ny,
                n1 * n2 * ny
            )));
        }
        for (r, row) in w.chunks(ny).enumerate() {
            check_distribution("channel", r + 1, row)?;
        }
        Ok(MacChannel { n1, n2, ny, w })
    }

    pub fn row_index(&self, x1: usize, x2: usize) -> usize {
        x1 + self.n1 * x2
    }

    pub fn row(&self, x1: usize, x2: usize) -> &[f64] {
        let r = self.row_index(x1, x2);
        &self.w[r * self.ny..(r + 1) * self.ny]
    }

    pub fn prob(&self, y: usize, x1: usize, x2: usize) -> f64 {
        self.row(x1, x2)[y]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.w.chunks_exact(self.ny)
    }

    pub fn input_size(&self, user: User) -> usize {
        match user {
            User::One => self.n1,
            User::Two => self.n2,
        }
    }
}

/// Per-user pair of class input distributions plus optional thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassPolicy {
    /// `q[user][class]`.
    pub q: [[InputDistribution; 2]; 2],
    /// `None` means the thresholds are to be optimized.
    pub gamma: Option<[f64; 2]>,
}

impl ClassPolicy {
    pub fn dist(&self, user: User, class: Class) -> &InputDistribution {
        &self.q[user.index()][class.index()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemModel {
    pub source1: SourceSpec,
    pub source2: SourceSpec,
    pub channel: MacChannel,
    pub policy: ClassPolicy,
}

impl SystemModel {
    pub fn source(&self, user: User) -> &SourceSpec {
        match user {
            User::One => &self.source1,
            User::Two => &self.source2,
        }
    }

    pub fn dist(&self, user: User, class: Class) -> &InputDistribution {
        self.policy.dist(user, class)
    }

    /// Returns the model if [`SystemModel::validate`] reports nothing.
    pub fn validated(self) -> Result<Self> {
        let v = self.validate();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(Error::Invalid(v))
        }
    }

    /// Every broken invariant, each naming the field and the offending magnitude.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        self.source1.violations("source1", &mut out);
        self.source2.violations("source2", &mut out);

        let ch = &self.channel;
        if ch.w.len() != ch.n1 * ch.n2 * ch.ny {
            out.push(Violation::new(
                "channel.w",
                format!("expected {} entries", ch.n1 * ch.n2 * ch.ny),
                ch.w.len() as f64,
            ));
        } else if ch.ny > 0 {
            for (r, row) in ch.w.chunks(ch.ny).enumerate() {
                distribution_violations(&format!("channel.row[{}]", r + 1), row, &mut out);
            }
        }

        for user in User::BOTH {
            for class in Class::ALL {
                let q = self.dist(user, class);
                let field = format!("dist.{}.{}", user.number(), class.number());
                if q.len() != ch.input_size(user) {
                    out.push(Violation::new(
                        format!("{field}.len"),
                        format!(
                            "lives on {} symbols but user {} has {} channel inputs",
                            q.len(),
                            user.number(),
                            ch.input_size(user)
                        ),
                        q.len() as f64,
                    ));
                }
                distribution_violations(&field, &q.probs, &mut out);
            }
        }

        if let Some(gamma) = self.policy.gamma {
            for (k, g) in gamma.iter().enumerate() {
                if !(0.0..=1.0).contains(g) {
                    out.push(Violation::new(
                        format!("gamma{}", k + 1),
                        "threshold outside [0, 1]",
                        *g,
                    ));
                }
            }
        }
        out
    }
}

/// A broken invariant: which field, what is wrong, and the offending value.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: String,
    pub message: String,
    pub magnitude: f64,
}

impl Violation {
    pub fn new(field: impl Into<String>, message: impl Into<String>, magnitude: f64) -> Self {
        Violation {
            field: field.into(),
            message: message.into(),
            magnitude,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} ({})", self.field, self.message, self.magnitude)
    }
}

fn check_distribution(what: &str, row: usize, probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::Dimension(format!("{what} row {row} is empty")));
    }
    if let Some(&bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::Dimension(format!(
            "{what} row {row} has invalid probability {bad}"
        )));
    }
    let residual = probs.iter().sum::<f64>() - 1.0;
    if residual.abs() > PROB_TOL {
        return Err(Error::ProbabilitySum {
            what: what.to_string(),
            row,
            residual,
        });
    }
    Ok(())
}

fn distribution_violations(field: &str, probs: &[f64], out: &mut Vec<Violation>) {
    for (i, &p) in probs.iter().enumerate() {
        if !p.is_finite() || p < 0.0 {
            out.push(Violation::new(
                format!("{field}[{}]", i + 1),
                "negative or non-finite probability",
                p,
            ));
        }
    }
    let residual = probs.iter().sum::<f64>() - 1.0;
    if residual.abs() > PROB_TOL {
        out.push(Violation::new(
            format!("{field}.sum"),
            "probabilities do not sum to 1 (residual shown)",
            residual,
        ));
    }
}
