//! Flat key = value case files.
//!
//! ```text
//! # comment
//! name   = generic-3x3
//! t = 3
//! c = 1
//! r = 2
//! n = 8
//! a = 1, 1, 1
//! b = 0, 0, 0
//! matrix = generic          # generic | power | random | explicit
//! seed   = 0
//! row    = x0, x1, x2^2     # explicit only, one line per row
//! prime  = 101
//! window = -3..5
//! checks = tangent, nB, fib1, fib2
//! ---
//! (next case in batch mode)
//! ```
//!
//! Keys may appear once except `row`. Unknown keys are rejected.

use anyhow::{anyhow, bail, Context, Result};
use detloci::detschemes::MatrixSpec;
use detloci::invariants::DegreeData;
use detloci::verifier::Quantity;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixKind {
    Generic,
    Power,
    Random,
    Explicit,
}

#[derive(Clone, Debug)]
pub struct CaseSpec {
    pub name: Option<String>,
    pub data: DegreeData,
    pub kind: MatrixKind,
    pub seed: Option<u64>,
    pub rows: Vec<Vec<String>>,
    pub prime: Option<u32>,
    pub window: Option<(i64, i64)>,
    pub checks: Option<Vec<Quantity>>,
}

impl CaseSpec {
    pub fn matrix(&self, seed_override: Option<u64>) -> MatrixSpec {
        let seed = seed_override.or(self.seed).unwrap_or(0);
        match self.kind {
            MatrixKind::Generic => MatrixSpec::Generic,
            MatrixKind::Power => MatrixSpec::Power,
            MatrixKind::Random => MatrixSpec::Random { seed },
            MatrixKind::Explicit => MatrixSpec::Explicit { entries: self.rows.clone(), seed },
        }
    }
}

pub fn parse_window(s: &str) -> Result<(i64, i64)> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| anyhow!("window must look like d0..d1, got {s:?}"))?;
    let lo: i64 = lo.trim().parse().with_context(|| format!("window start {lo:?}"))?;
    let hi: i64 = hi.trim().parse().with_context(|| format!("window end {hi:?}"))?;
    if lo > hi {
        bail!("window {lo}..{hi} is empty");
    }
    Ok((lo, hi))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<i64>> {
    v.split(',').map(|x| x.trim().parse::<i64>().with_context(|| format!("{key}: bad integer {x:?}"))).collect()
}

fn parse_int<T: std::str::FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    v.trim().parse::<T>().with_context(|| format!("{key}: bad value {v:?}"))
}

/// Parses one case from `key = value` pairs.
pub fn parse_pairs<'a>(pairs: impl IntoIterator<Item = (usize, &'a str, &'a str)>) -> Result<CaseSpec> {
    let mut seen = std::collections::HashSet::new();
    let (mut t, mut c, mut r, mut n) = (None, None, None, None);
    let (mut a, mut b) = (None, None);
    let mut spec = CaseSpec {
        name: None,
        data: DegreeData::raw(0, 0, 0, 0, Vec::new(), Vec::new()),
        kind: MatrixKind::Random,
        seed: None,
        rows: Vec::new(),
        prime: None,
        window: None,
        checks: None,
    };
    for (line, key, value) in pairs {
        let ctx = || format!("line {line}");
        if key != "row" && !seen.insert(key.to_string()) {
            bail!("line {line}: duplicate key {key:?}");
        }
        match key {
            "t" => t = Some(parse_int::<i64>(key, value).with_context(ctx)?),
            "c" => c = Some(parse_int::<i64>(key, value).with_context(ctx)?),
            "r" => r = Some(parse_int::<i64>(key, value).with_context(ctx)?),
            "n" => n = Some(parse_int::<i64>(key, value).with_context(ctx)?),
            "a" => a = Some(parse_list(key, value).with_context(ctx)?),
            "b" => b = Some(parse_list(key, value).with_context(ctx)?),
            "name" => spec.name = Some(value.to_string()),
            "seed" => spec.seed = Some(parse_int::<u64>(key, value).with_context(ctx)?),
            "prime" => spec.prime = Some(parse_int::<u32>(key, value).with_context(ctx)?),
            "window" => spec.window = Some(parse_window(value).with_context(ctx)?),
            "matrix" => {
                spec.kind = match value {
                    "generic" => MatrixKind::Generic,
                    "power" => MatrixKind::Power,
                    "random" => MatrixKind::Random,
                    "explicit" => MatrixKind::Explicit,
                    other => bail!("line {line}: unknown matrix kind {other:?} (generic, power, random, explicit)"),
                }
            }
            "row" => spec.rows.push(value.split(',').map(|x| x.trim().to_string()).collect()),
            "checks" => {
                let qs = value
                    .split(',')
                    .map(|x| Quantity::from_name(x.trim()).ok_or_else(|| anyhow!("line {line}: unknown check {:?}", x.trim())))
                    .collect::<Result<Vec<_>>>()?;
                spec.checks = Some(qs);
            }
            other => bail!("line {line}: unknown key {other:?}"),
        }
    }
    let need = |v: Option<i64>, k: &str| v.ok_or_else(|| anyhow!("missing key {k:?}"));
    let data = DegreeData::new(
        need(t, "t")?,
        need(c, "c")?,
        need(r, "r")?,
        need(n, "n")?,
        a.ok_or_else(|| anyhow!("missing key \"a\""))?,
        b.ok_or_else(|| anyhow!("missing key \"b\""))?,
    )?;
    if !spec.rows.is_empty() && spec.kind != MatrixKind::Explicit {
        bail!("row given but matrix is not explicit");
    }
    if spec.kind == MatrixKind::Explicit && spec.rows.is_empty() {
        bail!("explicit matrix needs row lines");
    }
    spec.data = data;
    Ok(spec)
}

/// Parses a case file; `---` lines separate cases.
pub fn parse_cases(text: &str) -> Result<Vec<CaseSpec>> {
    let mut blocks: Vec<Vec<(usize, &str, &str)>> = vec![Vec::new()];
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line == "---" {
            blocks.push(Vec::new());
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| anyhow!("line {}: expected key = value", k + 1))?;
        blocks.last_mut().unwrap().push((k + 1, key.trim(), value.trim()));
    }
    let cases: Vec<CaseSpec> = blocks
        .into_iter()
        .filter(|b| !b.is_empty())
        .enumerate()
        .map(|(i, b)| parse_pairs(b).with_context(|| format!("case {}", i + 1)))
        .collect::<Result<_>>()?;
    if cases.is_empty() {
        bail!("no case in file");
    }
    Ok(cases)
}

/// Parses `key=value` command-line arguments as one case.
pub fn parse_args(args: &[String]) -> Result<CaseSpec> {
    let pairs = args
        .iter()
        .enumerate()
        .map(|(i, s)| s.split_once('=').map(|(k, v)| (i + 1, k.trim(), v.trim())).ok_or_else(|| anyhow!("argument {s:?} is not key=value")))
        .collect::<Result<Vec<_>>>()?;
    parse_pairs(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_case() {
        let text = "name = g\nt = 3\nc = 1 # one column\nr = 2\nn = 8\na = 1,1,1\nb = 0, 0, 0\nmatrix = generic\nwindow = -1..2\nchecks = tangent, fib1\n";
        let cs = parse_cases(text).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].data.a, vec![1, 1, 1]);
        assert_eq!(cs[0].window, Some((-1, 2)));
        assert_eq!(cs[0].checks, Some(vec![Quantity::Tangent, Quantity::Fib1]));
        assert_eq!(cs[0].matrix(None), MatrixSpec::Generic);
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        let base = "t=3\nc=1\nr=2\nn=8\na=1,1,1\nb=0,0,0\n";
        assert!(parse_cases(&format!("{base}colour=red\n")).map(|_| ()).map_err(|e| format!("{e:#}")).unwrap_err().contains("unknown key"));
        assert!(parse_cases(&format!("{base}t=4\n")).map(|_| ()).map_err(|e| format!("{e:#}")).unwrap_err().contains("duplicate"));
        assert!(parse_cases("t=3\n").is_err());
    }

    #[test]
    fn batch_and_explicit_rows() {
        let text = "t=2\nc=1\nr=1\nn=3\na=1,1\nb=0,0\nmatrix=explicit\nrow=x0,x1\nrow=x2,x3\n---\nt=2\nc=1\nr=1\nn=3\na=1,1\nb=0,0\n";
        let cs = parse_cases(text).unwrap();
        assert_eq!(cs.len(), 2);
        assert_eq!(cs[0].rows.len(), 2);
        assert_eq!(cs[1].kind, MatrixKind::Random);
    }

    #[test]
    fn window_grammar() {
        assert_eq!(parse_window("-3..5").unwrap(), (-3, 5));
        assert!(parse_window("5..-3").is_err());
        assert!(parse_window("3").is_err());
    }
}
