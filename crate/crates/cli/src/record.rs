use std::fmt::Write as _;

use serde::Serialize;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const COLUMNS: [&str; 12] = [
    "experiment",
    "k",
    "n",
    "N",
    "L",
    "l",
    "seed",
    "trials",
    "observed",
    "analytic",
    "abs_err",
    "wall_ms",
];

/// One result row. Empty parameters serialize as empty CSV fields and JSON nulls.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub experiment: String,
    pub k: Option<usize>,
    pub n: Option<usize>,
    #[serde(rename = "N")]
    pub sample_len: Option<usize>,
    #[serde(rename = "L")]
    pub complexity_bound: Option<usize>,
    pub l: Option<usize>,
    pub seed: u64,
    pub trials: Option<usize>,
    pub observed: f64,
    pub analytic: Option<f64>,
    pub abs_err: Option<f64>,
    pub wall_ms: Option<f64>,
}

impl Record {
    pub fn new(experiment: impl Into<String>, seed: u64, observed: f64) -> Self {
        Record {
            experiment: experiment.into(),
            k: None,
            n: None,
            sample_len: None,
            complexity_bound: None,
            l: None,
            seed,
            trials: None,
            observed,
            analytic: None,
            abs_err: None,
            wall_ms: None,
        }
    }

    pub fn k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn detector(mut self, sample_len: usize, bound: usize) -> Self {
        self.sample_len = Some(sample_len);
        self.complexity_bound = Some(bound);
        self
    }

    pub fn l(mut self, l: usize) -> Self {
        self.l = Some(l);
        self
    }

    pub fn trials(mut self, trials: usize) -> Self {
        self.trials = Some(trials);
        self
    }

    /// Sets the reference value and the absolute error against it.
    pub fn analytic(mut self, value: f64) -> Self {
        self.analytic = Some(value);
        self.abs_err = Some((self.observed - value).abs());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Table,
}

pub fn render(records: &[Record], format: Format) -> anyhow::Result<String> {
    match format {
        Format::Csv => render_csv(records),
        Format::Json => render_json(records),
        Format::Table => Ok(render_table(records)),
    }
}

/// A `# conjugate <version>` line, then the header row and one row per record.
pub fn render_csv(records: &[Record]) -> anyhow::Result<String> {
    let mut out = format!("# conjugate {VERSION}\n").into_bytes();
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .has_headers(false)
            .from_writer(&mut out);
        w.write_record(COLUMNS)?;
        for r in records {
            w.serialize(r)?;
        }
        w.flush()?;
    }
    Ok(String::from_utf8(out)?)
}

#[derive(Serialize)]
struct Envelope<'a> {
    version: &'a str,
    records: &'a [Record],
}

pub fn render_json(records: &[Record]) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(&Envelope {
        version: VERSION,
        records,
    })?;
    s.push('\n');
    Ok(s)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "-".into())
}

fn sci(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6e}")).unwrap_or_else(|| "-".into())
}

pub fn render_table(records: &[Record]) -> String {
    let mut out = format!(
        "{:<32} {:>3} {:>3} {:>4} {:>3} {:>3} {:>8} {:>14} {:>14} {:>14}\n",
        "experiment", "k", "n", "N", "L", "l", "trials", "observed", "analytic", "abs_err"
    );
    for r in records {
        let _ = writeln!(
            out,
            "{:<32} {:>3} {:>3} {:>4} {:>3} {:>3} {:>8} {:>14} {:>14} {:>14}",
            r.experiment,
            opt(r.k),
            opt(r.n),
            opt(r.sample_len),
            opt(r.complexity_bound),
            opt(r.l),
            opt(r.trials),
            sci(Some(r.observed)),
            sci(r.analytic),
            sci(r.abs_err),
        );
    }
    out
}
