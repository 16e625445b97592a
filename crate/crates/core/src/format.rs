//! Line-oriented model files.
//!
//! ```text
//! # comment
//! [source.1]
//! probs = 0.028 0.972
//! [source.2]
//! probs = 0.01155 0.98845
//! [channel]
//! inputs1 = 6
//! inputs2 = 6
//! outputs = 4
//! row = 0.832 0.056 0.056 0.056     # (x1, x2) = (1, 1)
//! ...                               # n1 * n2 rows, x1 fastest
//! [dist.1.1]
//! probs = 0 0 0 0 0.5 0.5
//! ...
//! [thresholds]                      # optional; absent means "optimize"
//! gamma1 = 0.8159
//! gamma2 = 0.7057
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{ClassPolicy, InputDistribution, MacChannel, SourceSpec, SystemModel, User};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Source(usize),
    Channel,
    Dist(usize, usize),
    Thresholds,
}

impl Section {
    fn parse(header: &str) -> Option<Section> {
        let parts: Vec<&str> = header.split('.').map(str::trim).collect();
        match parts.as_slice() {
            ["source", n] => match *n {
                "1" => Some(Section::Source(0)),
                "2" => Some(Section::Source(1)),
                _ => None,
            },
            ["channel"] => Some(Section::Channel),
            ["dist", u, c] => {
                let u = match *u {
                    "1" => 0,
                    "2" => 1,
                    _ => return None,
                };
                let c = match *c {
                    "1" => 0,
                    "2" => 1,
                    _ => return None,
                };
                Some(Section::Dist(u, c))
            }
            ["thresholds"] => Some(Section::Thresholds),
            _ => None,
        }
    }
}

/// Numbers with the line they came from.
type Entry = Option<(usize, Vec<f64>)>;

#[derive(Default)]
struct Draft {
    sources: [Entry; 2],
    dists: [[Entry; 2]; 2],
    n1: Option<usize>,
    n2: Option<usize>,
    ny: Option<usize>,
    rows: Vec<(usize, Vec<f64>)>,
    gamma: [Option<f64>; 2],
    seen: Vec<Section>,
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_numbers(line: usize, text: &str) -> Result<Vec<f64>> {
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| syntax(line, format!("'{tok}' is not a decimal number")))
        })
        .collect()
}

fn parse_count(line: usize, text: &str) -> Result<usize> {
    text.trim()
        .parse::<usize>()
        .map_err(|_| syntax(line, format!("'{}' is not a positive integer", text.trim())))
}

/// Parses and fully validates a model file.
pub fn parse_model(text: &str) -> Result<SystemModel> {
    let mut draft = Draft::default();
    let mut section: Option<Section> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(header) = content.strip_prefix('[') {
            let header = header
                .strip_suffix(']')
                .ok_or_else(|| syntax(line, "unterminated section header"))?;
            let s = Section::parse(header)
                .ok_or_else(|| syntax(line, format!("unknown section [{header}]")))?;
            if draft.seen.contains(&s) {
                return Err(syntax(line, format!("duplicate section [{header}]")));
            }
            draft.seen.push(s);
            section = Some(s);
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| syntax(line, "expected 'key = value'"))?;
        let key = key.trim();
        let Some(current) = section else {
            return Err(syntax(line, "key outside of any section"));
        };
        match (current, key) {
            (Section::Source(u), "probs") => {
                if draft.sources[u].is_some() {
                    return Err(syntax(line, "probs given twice"));
                }
                draft.sources[u] = Some((line, parse_numbers(line, value)?));
            }
            (Section::Dist(u, c), "probs") => {
                if draft.dists[u][c].is_some() {
                    return Err(syntax(line, "probs given twice"));
                }
                draft.dists[u][c] = Some((line, parse_numbers(line, value)?));
            }
            (Section::Channel, "inputs1") => draft.n1 = Some(parse_count(line, value)?),
            (Section::Channel, "inputs2") => draft.n2 = Some(parse_count(line, value)?),
            (Section::Channel, "outputs") => draft.ny = Some(parse_count(line, value)?),
            (Section::Channel, "row") => draft.rows.push((line, parse_numbers(line, value)?)),
            (Section::Thresholds, "gamma1") => {
                draft.gamma[0] = Some(parse_numbers(line, value).and_then(|v| single(line, v))?)
            }
            (Section::Thresholds, "gamma2") => {
                draft.gamma[1] = Some(parse_numbers(line, value).and_then(|v| single(line, v))?)
            }
            (_, other) => return Err(syntax(line, format!("unexpected key '{other}'"))),
        }
    }

    build(draft)
}

fn single(line: usize, v: Vec<f64>) -> Result<f64> {
    match v.as_slice() {
        [x] => Ok(*x),
        _ => Err(syntax(line, "expected exactly one number")),
    }
}

fn build(mut d: Draft) -> Result<SystemModel> {
    let missing = |what: &str| Error::Dimension(format!("missing {what}"));

    let mut sources = Vec::with_capacity(2);
    for (u, s) in d.sources.into_iter().enumerate() {
        let (_, probs) = s.ok_or_else(|| missing(&format!("[source.{}] probs", u + 1)))?;
        sources.push(SourceSpec::new(probs).map_err(|e| relabel(e, &format!("source {}", u + 1)))?);
    }

    let n1 = d.n1.ok_or_else(|| missing("[channel] inputs1"))?;
    let n2 = d.n2.ok_or_else(|| missing("[channel] inputs2"))?;
    let ny = d.ny.ok_or_else(|| missing("[channel] outputs"))?;
    if d.rows.len() != n1 * n2 {
        return Err(Error::Dimension(format!(
            "channel has {} rows, expected inputs1 * inputs2 = {}",
            d.rows.len(),
            n1 * n2
        )));
    }
    let mut w = Vec::with_capacity(n1 * n2 * ny);
    for (r, (line, row)) in d.rows.iter().enumerate() {
        if row.len() != ny {
            return Err(Error::Dimension(format!(
                "line {line}: channel row {} has {} entries, expected outputs = {ny}",
                r + 1,
                row.len()
            )));
        }
        w.extend_from_slice(row);
    }
    let channel = MacChannel::new(n1, n2, ny, w)?;

    let mut dist = |u: usize, c: usize| -> Result<InputDistribution> {
        let (line, probs) = d.dists[u][c]
            .take()
            .ok_or_else(|| missing(&format!("[dist.{}.{}] probs", u + 1, c + 1)))?;
        let expected = channel.input_size(if u == 0 { User::One } else { User::Two });
        if probs.len() != expected {
            return Err(Error::Dimension(format!(
                "line {line}: dist.{}.{} has {} entries, user {} has {expected} channel inputs",
                u + 1,
                c + 1,
                probs.len(),
                u + 1
            )));
        }
        InputDistribution::new(probs).map_err(|e| relabel(e, &format!("dist.{}.{}", u + 1, c + 1)))
    };
    let q = [[dist(0, 0)?, dist(0, 1)?], [dist(1, 0)?, dist(1, 1)?]];

    let gamma = match d.gamma {
        [None, None] => None,
        [Some(a), Some(b)] => Some([a, b]),
        _ => {
            return Err(Error::Dimension(
                "[thresholds] needs both gamma1 and gamma2".into(),
            ))
        }
    };

    let source2 = sources.pop().expect("two sources");
    let source1 = sources.pop().expect("two sources");
    SystemModel {
        source1,
        source2,
        channel,
        policy: ClassPolicy { q, gamma },
    }
    .validated()
}

fn relabel(e: Error, what: &str) -> Error {
    match e {
        Error::ProbabilitySum { row, residual, .. } => Error::ProbabilitySum {
            what: what.to_string(),
            row,
            residual,
        },
        other => other,
    }
}

/// Writes a model in the file grammar. Numbers use the shortest decimal that
/// round-trips, so `parse_model(&serialize_model(m))` reproduces `m` exactly.
pub fn serialize_model(m: &SystemModel) -> String {
    let mut out = String::new();
    let join = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x:?}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    for (k, s) in [&m.source1, &m.source2].into_iter().enumerate() {
        let _ = writeln!(out, "[source.{}]\nprobs = {}\n", k + 1, join(&s.probs));
    }
    let ch = &m.channel;
    let _ = writeln!(
        out,
        "[channel]\ninputs1 = {}\ninputs2 = {}\noutputs = {}",
        ch.n1, ch.n2, ch.ny
    );
    for x2 in 0..ch.n2 {
        for x1 in 0..ch.n1 {
            let _ = writeln!(
                out,
                "row = {}  # x1={} x2={}",
                join(ch.row(x1, x2)),
                x1 + 1,
                x2 + 1
            );
        }
    }
    out.push('\n');
    for u in 0..2 {
        for c in 0..2 {
            let _ = writeln!(
                out,
                "[dist.{}.{}]\nprobs = {}\n",
                u + 1,
                c + 1,
                join(&m.policy.q[u][c].probs)
            );
        }
    }
    if let Some([g1, g2]) = m.policy.gamma {
        let _ = writeln!(out, "[thresholds]\ngamma1 = {g1:?}\ngamma2 = {g2:?}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paperex::build_paper_model;

    const SMALL: &str = "\
# two binary users
[source.1]
probs = 0.3 0.7
[source.2]
probs = 0.1 0.9

[channel]
inputs1 = 2
inputs2 = 2
outputs = 2
row = 0.9 0.1
row = 0.2 0.8
row = 0.5 0.5
row = 0.1 0.9   # last row
[dist.1.1]
probs = 0.5 0.5
[dist.1.2]
probs = 1 0
[dist.2.1]
probs = 0.5 0.5
[dist.2.2]
probs = 0 1
";

    #[test]
    fn parses_small_model() {
        let m = parse_model(SMALL).unwrap();
        assert_eq!(m.channel.row(1, 0), &[0.2, 0.8]);
        assert_eq!(m.channel.row(0, 1), &[0.5, 0.5]);
        assert_eq!(m.policy.gamma, None);
    }

    #[test]
    fn example_fixture_round_trips() {
        let m = build_paper_model();
        let text = serialize_model(&m);
        assert_eq!(parse_model(&text).unwrap(), m);
    }

    #[test]
    fn thresholds_round_trip() {
        let mut m = build_paper_model();
        m.policy.gamma = Some([0.8159, 0.7057]);
        assert_eq!(parse_model(&serialize_model(&m)).unwrap(), m);
    }

    #[test]
    fn bad_row_sum_names_row() {
        let text = SMALL.replace("row = 0.5 0.5", "row = 0.5 0.4");
        match parse_model(&text) {
            Err(Error::ProbabilitySum {
                what,
                row,
                residual,
            }) => {
                assert_eq!(what, "channel");
                assert_eq!(row, 3);
                assert!((residual + 0.1).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_error_reports_line() {
        let text = SMALL.replace("probs = 0.3 0.7", "probs = 0.3 zero");
        match parse_model(&text) {
            Err(Error::Syntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn row_count_mismatch_is_dimension_error() {
        let text = SMALL.replace("row = 0.1 0.9   # last row\n", "");
        assert!(matches!(parse_model(&text), Err(Error::Dimension(_))));
    }

    #[test]
    fn gamma_outside_unit_interval_rejected() {
        let text = format!("{SMALL}[thresholds]\ngamma1 = 1.5\ngamma2 = 0.5\n");
        match parse_model(&text) {
            Err(Error::Invalid(v)) => assert_eq!(v[0].field, "gamma1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_section_and_duplicate_rejected() {
        assert!(matches!(
            parse_model("[source.3]\n"),
            Err(Error::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_model("[channel]\n[channel]\n"),
            Err(Error::Syntax { line: 2, .. })
        ));
    }
}
