//! Experiment runner for the conjugate-coding laboratory: every analysis as a seeded,
//! reproducible command emitting CSV or JSON rows.

pub mod experiments;
pub mod record;

use std::str::FromStr;

use anyhow::{bail, ensure};

pub use record::{render, Format, Record};

/// Parses `3`, `1..6` (inclusive) or `2,4,6`.
pub fn parse_k_list(s: &str) -> anyhow::Result<Vec<usize>> {
    let s = s.trim();
    let ks: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (
            usize::from_str(a.trim())?,
            usize::from_str(b.trim().trim_start_matches('='))?,
        );
        ensure!(a <= b, "empty range {s}");
        (a..=b).collect()
    } else {
        s.split(',')
            .map(|p| usize::from_str(p.trim()).map_err(anyhow::Error::from))
            .collect::<anyhow::Result<_>>()?
    };
    if ks.contains(&0) {
        bail!("k must be positive in {s}");
    }
    Ok(ks)
}

/// A parsed `--k` argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KList(pub Vec<usize>);

impl FromStr for KList {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        parse_k_list(s).map(KList)
    }
}

/// Thread count from `CONJUGATE_THREADS`; `None` when unset.
pub fn thread_count(value: Option<&str>) -> anyhow::Result<Option<usize>> {
    match value {
        None => Ok(None),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => bail!("CONJUGATE_THREADS must be a positive integer, got {v:?}"),
        },
    }
}
