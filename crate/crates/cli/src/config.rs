//! Experiment configuration from flags and flat `key=value` files.
//!
//! File keys are the flag names without the leading dashes. `grid` may be
//! repeated. Flags override file values.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use ffsieve::gfpoly::{is_prime, FieldConfig};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Verify,
    Bound,
    Count,
    Duality,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Verify => "verify",
            Suite::Bound => "bound",
            Suite::Count => "count",
            Suite::Duality => "duality",
            Suite::All => "all",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "verify" => Suite::Verify,
            "bound" => Suite::Bound,
            "count" => Suite::Count,
            "duality" => Suite::Duality,
            "all" => Suite::All,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilySpec {
    Full,
    KPower,
    /// Denominator tuples read from a file.
    Explicit(PathBuf),
}

impl FamilySpec {
    pub fn text(&self) -> String {
        match self {
            FamilySpec::Full => "full".into(),
            FamilySpec::KPower => "kpower".into(),
            FamilySpec::Explicit(p) => format!("explicit:{}", p.display()),
        }
    }
}

/// Parameters that a grid may sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridParam {
    N,
    BigN,
    Q,
    K,
}

impl GridParam {
    pub fn name(self) -> &'static str {
        match self {
            GridParam::N => "n",
            GridParam::BigN => "N",
            GridParam::Q => "Q",
            GridParam::K => "k",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridAxis {
    pub param: GridParam,
    pub lo: u32,
    pub hi: u32,
}

impl GridAxis {
    fn parse(s: &str) -> Result<Self, CliError> {
        let bad =
            || CliError::Validation(format!("grid axis `{s}` is not of the form param=lo..hi"));
        let (name, range) = s.split_once('=').ok_or_else(bad)?;
        let param = match name.trim() {
            "n" => GridParam::N,
            "N" => GridParam::BigN,
            "Q" => GridParam::Q,
            "k" => GridParam::K,
            other => {
                return Err(CliError::Validation(format!(
                    "grid parameter `{other}` is not one of n, N, Q, k"
                )))
            }
        };
        let (lo, hi) = range.split_once("..").ok_or_else(bad)?;
        let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(CliError::Validation(format!("grid axis `{s}` is empty")));
        }
        Ok(GridAxis { param, lo, hi })
    }

    pub fn text(&self) -> String {
        format!("{}={}..{}", self.param.name(), self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub p: u32,
    pub m: u32,
    /// Coefficients of the modulus defining F_q over F_p, constant first.
    pub h: Option<Vec<u32>>,
    pub n: usize,
    pub big_n: usize,
    pub q_bound: usize,
    pub k: u32,
    pub family: FamilySpec,
    pub trials: usize,
    pub seed: u64,
    pub suite: Suite,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub grid: Vec<GridAxis>,
    pub farey_csv: Option<PathBuf>,
}

#[derive(Debug, Parser)]
#[command(
    name = "ffsieve",
    version,
    about = "Exact large sieve experiments over F_q[t]"
)]
struct Args {
    /// Characteristic.
    #[arg(long)]
    p: Option<String>,
    /// Extension degree, q = p^m.
    #[arg(long)]
    m: Option<String>,
    /// Modulus for F_q as comma-separated coefficients, constant first.
    #[arg(long)]
    h: Option<String>,
    /// Dimension.
    #[arg(long)]
    n: Option<String>,
    /// Ball radius: g has coordinates of degree ≤ N.
    #[arg(long = "N")]
    big_n: Option<String>,
    /// Degree bound on denominators (base degree for power families).
    #[arg(long = "Q")]
    q_bound: Option<String>,
    /// Power for the kpower family.
    #[arg(long)]
    k: Option<String>,
    /// full | kpower | explicit:<path>
    #[arg(long)]
    family: Option<String>,
    /// Random coefficient sequences per duality check.
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// verify | bound | count | duality | all
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// json | csv
    #[arg(long)]
    format: Option<String>,
    /// Sweep, e.g. "Q=0..2". Repeatable; params n, N, Q, k.
    #[arg(long)]
    grid: Vec<String>,
    /// key=value file with defaults for any flag.
    #[arg(long)]
    config: Option<String>,
    /// Write S_Q of the first parameter tuple as CSV.
    #[arg(long = "farey-csv")]
    farey_csv: Option<String>,
}

type Entries = BTreeMap<String, Vec<String>>;

const KEYS: [&str; 15] = [
    "p",
    "m",
    "h",
    "n",
    "N",
    "Q",
    "k",
    "family",
    "trials",
    "seed",
    "suite",
    "out",
    "format",
    "grid",
    "farey-csv",
];

fn parse_file_text(text: &str) -> Result<Entries, CliError> {
    let mut out = Entries::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {}: expected key=value", lineno + 1))
        })?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(CliError::Usage(format!(
                "config line {}: unknown key `{k}`",
                lineno + 1
            )));
        }
        out.entry(k.to_string())
            .or_default()
            .push(v.trim().to_string());
    }
    Ok(out)
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse()
        .map_err(|_| CliError::Validation(format!("{key}: `{v}` is not a valid number")))
}

impl ExperimentConfig {
    /// Parses command-line tokens (without the program name).
    pub fn from_args<I, S>(tokens: I) -> Result<Self, CliError>
    where
        I: IntoIterator<Item = S>,
        S: Into<std::ffi::OsString> + Clone,
    {
        let args = Args::try_parse_from(
            std::iter::once("ffsieve".into()).chain(tokens.into_iter().map(Into::into)),
        )
        .map_err(CliError::Clap)?;
        let mut entries = match &args.config {
            Some(path) => {
                let text =
                    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
                parse_file_text(&text)?
            }
            None => Entries::new(),
        };
        let flags = [
            ("p", &args.p),
            ("m", &args.m),
            ("h", &args.h),
            ("n", &args.n),
            ("N", &args.big_n),
            ("Q", &args.q_bound),
            ("k", &args.k),
            ("family", &args.family),
            ("trials", &args.trials),
            ("seed", &args.seed),
            ("suite", &args.suite),
            ("out", &args.out),
            ("format", &args.format),
            ("farey-csv", &args.farey_csv),
        ];
        for (key, val) in flags {
            if let Some(v) = val {
                entries.insert(key.to_string(), vec![v.clone()]);
            }
        }
        if !args.grid.is_empty() {
            entries.insert("grid".into(), args.grid.clone());
        }
        Self::from_entries(&entries)
    }

    /// Parses the flat `key=value` format.
    pub fn from_text(text: &str) -> Result<Self, CliError> {
        Self::from_entries(&parse_file_text(text)?)
    }

    fn from_entries(e: &Entries) -> Result<Self, CliError> {
        let one = |key: &str| -> Result<Option<&str>, CliError> {
            match e.get(key).map(Vec::as_slice) {
                None | Some([]) => Ok(None),
                Some([v]) => Ok(Some(v.as_str())),
                Some(_) => Err(CliError::Usage(format!("{key} given more than once"))),
            }
        };
        let p: u32 = match one("p")? {
            Some(v) => parse_num("p", v)?,
            None => return Err(CliError::Usage("--p is required".into())),
        };
        if !is_prime(p) {
            return Err(CliError::Validation(format!("p = {p} is not prime")));
        }
        let m: u32 = one("m")?.map_or(Ok(1), |v| parse_num("m", v))?;
        let h = one("h")?
            .map(|v| {
                v.split(',')
                    .map(|c| parse_num::<u32>("h", c.trim()))
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?;
        FieldConfig::new(p, m, h.clone()).map_err(|err| CliError::Validation(err.to_string()))?;
        let n: usize = one("n")?.map_or(Ok(1), |v| parse_num("n", v))?;
        let big_n: usize = one("N")?.map_or(Ok(1), |v| parse_num("N", v))?;
        let q_bound: usize = one("Q")?.map_or(Ok(1), |v| parse_num("Q", v))?;
        let k: u32 = one("k")?.map_or(Ok(1), |v| parse_num("k", v))?;
        if n == 0 {
            return Err(CliError::Validation("n must be at least 1".into()));
        }
        if k == 0 {
            return Err(CliError::Validation("k must be at least 1".into()));
        }
        let family = match one("family")? {
            None | Some("full") => FamilySpec::Full,
            Some("kpower") => FamilySpec::KPower,
            Some(v) => match v.strip_prefix("explicit:") {
                Some(path) if !path.is_empty() => FamilySpec::Explicit(PathBuf::from(path)),
                _ => return Err(CliError::Validation(format!("unknown family `{v}`"))),
            },
        };
        let trials: usize = one("trials")?.map_or(Ok(32), |v| parse_num("trials", v))?;
        let seed: u64 = one("seed")?.map_or(Ok(0), |v| parse_num("seed", v))?;
        let suite = match one("suite")? {
            None => Suite::All,
            Some(v) => Suite::parse(v)
                .ok_or_else(|| CliError::Validation(format!("unknown suite `{v}`")))?,
        };
        let format = match one("format")? {
            None | Some("json") => Format::Json,
            Some("csv") => Format::Csv,
            Some(v) => return Err(CliError::Validation(format!("unsupported format `{v}`"))),
        };
        let grid = e
            .get("grid")
            .map(|axes| {
                axes.iter()
                    .map(|a| GridAxis::parse(a))
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?
            .unwrap_or_default();
        for (i, a) in grid.iter().enumerate() {
            if grid[..i].iter().any(|b| b.param == a.param) {
                return Err(CliError::Validation(format!(
                    "grid parameter {} repeated",
                    a.param.name()
                )));
            }
            if matches!(a.param, GridParam::N | GridParam::K) && a.lo == 0 {
                return Err(CliError::Validation(format!(
                    "grid over {} must start at 1",
                    a.param.name()
                )));
            }
        }
        Ok(ExperimentConfig {
            p,
            m,
            h,
            n,
            big_n,
            q_bound,
            k,
            family,
            trials,
            seed,
            suite,
            out: one("out")?.map(PathBuf::from),
            format,
            grid,
            farey_csv: one("farey-csv")?.map(PathBuf::from),
        })
    }

    /// The configuration as ordered `(key, value)` pairs; `grid` may repeat.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let mut out = vec![("p", self.p.to_string()), ("m", self.m.to_string())];
        if let Some(h) = &self.h {
            out.push((
                "h",
                h.iter().map(u32::to_string).collect::<Vec<_>>().join(","),
            ));
        }
        out.extend([
            ("n", self.n.to_string()),
            ("N", self.big_n.to_string()),
            ("Q", self.q_bound.to_string()),
            ("k", self.k.to_string()),
            ("family", self.family.text()),
            ("trials", self.trials.to_string()),
            ("seed", self.seed.to_string()),
            ("suite", self.suite.name().to_string()),
        ]);
        if let Some(o) = &self.out {
            out.push(("out", o.display().to_string()));
        }
        out.push(("format", self.format.name().to_string()));
        for a in &self.grid {
            out.push(("grid", a.text()));
        }
        if let Some(f) = &self.farey_csv {
            out.push(("farey-csv", f.display().to_string()));
        }
        out
    }

    /// The configuration in the file format; `from_text` reads it back.
    pub fn to_text(&self) -> String {
        self.entries()
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }

    pub fn field(&self) -> Result<FieldConfig, CliError> {
        FieldConfig::new(self.p, self.m, self.h.clone())
            .map_err(|e| CliError::Validation(e.to_string()))
    }
}

/// Reads an explicit family: one tuple per line, coordinates separated by
/// `;`, each coordinate a comma-separated list of field element indices,
/// constant term first. Blank lines and `#` comments are skipped.
pub fn read_explicit_family(
    path: &Path,
    n: usize,
    cfg: &FieldConfig,
) -> Result<ffsieve::farey::ModuliFamily, CliError> {
    use ffsieve::gfpoly::Poly;
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut tuples = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tuple = line
            .split(';')
            .map(|coord| {
                let idx = coord
                    .split(',')
                    .map(|c| {
                        c.trim()
                            .parse::<usize>()
                            .ok()
                            .filter(|&i| i < cfg.q() as usize)
                            .ok_or_else(|| {
                                CliError::Validation(format!(
                                    "{}:{}: bad coefficient `{c}`",
                                    path.display(),
                                    lineno + 1
                                ))
                            })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Poly::from_indices(cfg, &idx))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        tuples.push(tuple);
    }
    ffsieve::farey::ModuliFamily::explicit(tuples, n, cfg)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}
