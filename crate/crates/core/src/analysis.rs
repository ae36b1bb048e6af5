//! Parameter sweeps, regime classification, constant-C contours and the
//! figure datasets.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::ser::{SerializeMap, SerializeSeq, Serializer};
use serde::Serialize;

use crate::correlations::{
    classical_correlation, discord, entanglement_threshold_te, is_separable, mutual_information,
    separability_margin,
};
use crate::error::{QetError, Result};
use crate::local_extraction::{solve_max_omega, thresholds, ThresholdSet};
use crate::numkit::{bisect, Bracket};
use crate::qet_protocol::{energy_injected_ea, optimal_qet};
use crate::spin_model::{gibbs_state, GibbsState, SystemParams, KT_MAX, KT_MIN};

/// Grid `lo:hi:n[:log]`, or a single value.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub log: bool,
}

impl GridSpec {
    pub fn linear(lo: f64, hi: f64, n: usize) -> Self {
        Self {
            lo,
            hi,
            n,
            log: false,
        }
    }

    pub fn log(lo: f64, hi: f64, n: usize) -> Self {
        Self {
            lo,
            hi,
            n,
            log: true,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let last = (self.n - 1) as f64;
        (0..self.n)
            .map(|i| {
                if i == 0 {
                    return self.lo;
                }
                if i + 1 == self.n {
                    return self.hi;
                }
                let f = i as f64 / last;
                if self.log {
                    (self.lo.ln() + f * (self.hi.ln() - self.lo.ln())).exp()
                } else {
                    self.lo + f * (self.hi - self.lo)
                }
            })
            .collect()
    }
}

impl FromStr for GridSpec {
    type Err = QetError;

    fn from_str(s: &str) -> Result<Self> {
        let bad =
            |why: &str| QetError::Domain(format!("grid '{s}': {why} (expected lo:hi:n[:log])"));
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| p.trim().parse::<f64>().map_err(|_| bad("bad number"));
        match parts.as_slice() {
            [v] => {
                let v = num(v)?;
                Ok(Self::linear(v, v, 1))
            }
            [lo, hi, n, rest @ ..] => {
                let (lo, hi) = (num(lo)?, num(hi)?);
                let n: usize = n.trim().parse().map_err(|_| bad("bad point count"))?;
                let log = match rest {
                    [] => false,
                    ["log"] => true,
                    _ => return Err(bad("unknown suffix")),
                };
                if n == 0 || !lo.is_finite() || !hi.is_finite() || hi < lo {
                    return Err(bad("need finite lo <= hi and n >= 1"));
                }
                if log && lo <= 0.0 {
                    return Err(bad("log grid needs lo > 0"));
                }
                Ok(Self { lo, hi, n, log })
            }
            _ => Err(bad("wrong number of fields")),
        }
    }
}

/// Comma-separated list of reals.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| QetError::Domain(format!("bad number '{p}' in list '{s}'")))
        })
        .collect()
}

/// One cell of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Scientific notation with 17 significant digits (round-trips exactly).
pub fn format_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format_f64(*v),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(t) if t.contains([',', '"', '\n']) => {
                format!("\"{}\"", t.replace('"', "\"\""))
            }
            Cell::Text(t) => t.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Num(v) if v.is_finite() => s.serialize_f64(*v),
            Cell::Num(_) | Cell::Empty => s.serialize_none(),
            Cell::Int(i) => s.serialize_i64(*i),
            Cell::Bool(b) => s.serialize_bool(*b),
            Cell::Text(t) => s.serialize_str(t),
        }
    }
}

/// Column-named dataset; serialized to JSON as a list of row objects.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn num(&self, row: usize, name: &str) -> Option<f64> {
        match self.rows.get(row)?.get(self.column(name)?)? {
            Cell::Num(v) => Some(*v),
            Cell::Int(i) => Some(*i as f64),
            _ => None,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }
}

struct RowRef<'a>(&'a [String], &'a [Cell]);

impl Serialize for RowRef<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0.iter().zip(self.1) {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl Serialize for Table {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows.len()))?;
        for row in &self.rows {
            seq.serialize_element(&RowRef(&self.columns, row))?;
        }
        seq.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    Discord,
    Classical,
    MutualInfo,
    EA,
    EB,
    OmegaMax,
    Separable,
    Thresholds,
}

impl Quantity {
    pub const ALL: [Quantity; 8] = [
        Quantity::Discord,
        Quantity::Classical,
        Quantity::MutualInfo,
        Quantity::EA,
        Quantity::EB,
        Quantity::OmegaMax,
        Quantity::Separable,
        Quantity::Thresholds,
    ];

    fn columns(self) -> &'static [&'static str] {
        match self {
            Quantity::Discord => &["discord"],
            Quantity::Classical => &["classical"],
            Quantity::MutualInfo => &["mutual_info"],
            Quantity::EA => &["E_A"],
            Quantity::EB => &["E_B"],
            Quantity::OmegaMax => &["omega_max"],
            Quantity::Separable => &["separable"],
            Quantity::Thresholds => &["Te", "T1", "T2"],
        }
    }
}

impl FromStr for Quantity {
    type Err = QetError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "discord" => Quantity::Discord,
            "classical" => Quantity::Classical,
            "mutual_info" => Quantity::MutualInfo,
            "E_A" => Quantity::EA,
            "E_B" => Quantity::EB,
            "omega_max" => Quantity::OmegaMax,
            "separable" => Quantity::Separable,
            "thresholds" => Quantity::Thresholds,
            other => return Err(QetError::Domain(format!("unknown quantity '{other}'"))),
        })
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub kappa_values: Vec<f64>,
    pub kt_values: Vec<f64>,
    pub quantities: Vec<Quantity>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.kappa_values.is_empty() || self.kt_values.is_empty() || self.quantities.is_empty() {
            return Err(QetError::Domain(
                "sweep needs non-empty kappa, kT and quantity lists".into(),
            ));
        }
        if let Some(t) = self
            .kt_values
            .iter()
            .find(|t| !(KT_MIN..=KT_MAX).contains(*t))
        {
            return Err(QetError::Domain(format!(
                "kT value {t} outside [{KT_MIN:e}, {KT_MAX:e}]"
            )));
        }
        Ok(())
    }
}

fn sweep_row(
    kappa: f64,
    kt: f64,
    qs: &[Quantity],
    thr: &Result<ThresholdSet>,
) -> Result<Vec<Cell>> {
    let s = gibbs_state(&SystemParams::new(kappa, kt)?)?;
    let mut cells = Vec::new();
    for q in qs {
        match q {
            Quantity::Discord => cells.push(discord(&s).into()),
            Quantity::Classical => cells.push(classical_correlation(&s).into()),
            Quantity::MutualInfo => cells.push(mutual_information(&s).into()),
            Quantity::EA => cells.push(energy_injected_ea(&s).into()),
            Quantity::EB => cells.push(optimal_qet(&s)?.e_b_max.into()),
            Quantity::OmegaMax => cells.push(solve_max_omega(&s).omega_max.into()),
            Quantity::Separable => cells.push(is_separable(&s.params)?.into()),
            Quantity::Thresholds => {
                let t = thr.as_ref().map_err(Clone::clone)?;
                cells.extend([t.te.into(), t.t1.into(), t.t2.into()]);
            }
        }
    }
    Ok(cells)
}

/// One row per `(kappa, kT)`, kappa-major. Rows that fail carry the error
/// message in the `error` column and empty quantity cells.
pub fn sweep(spec: &SweepSpec) -> Result<Table> {
    spec.validate()?;
    let mut cols = vec!["kappa", "kT"];
    for q in &spec.quantities {
        cols.extend(q.columns());
    }
    cols.push("error");
    let width = cols.len() - 3;
    let want_thr = spec.quantities.contains(&Quantity::Thresholds);
    let thr: Vec<Result<ThresholdSet>> = spec
        .kappa_values
        .par_iter()
        .map(|&k| {
            if want_thr {
                thresholds(k)
            } else {
                Ok(ThresholdSet {
                    te: None,
                    t1: None,
                    t2: None,
                })
            }
        })
        .collect();
    let points: Vec<(usize, f64)> = spec
        .kappa_values
        .iter()
        .enumerate()
        .flat_map(|(i, _)| spec.kt_values.iter().map(move |&t| (i, t)))
        .collect();
    let rows: Vec<Vec<Cell>> = points
        .par_iter()
        .map(|&(i, kt)| {
            let kappa = spec.kappa_values[i];
            let mut row = vec![Cell::Num(kappa), Cell::Num(kt)];
            match sweep_row(kappa, kt, &spec.quantities, &thr[i]) {
                Ok(cells) => {
                    row.extend(cells);
                    row.push(Cell::Empty);
                }
                Err(e) => {
                    row.extend(std::iter::repeat_n(Cell::Empty, width));
                    row.push(Cell::Text(e.to_string()));
                }
            }
            row
        })
        .collect();
    let mut table = Table::new(&cols);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Teleportation,
    Window,
    LocalExtraction,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::Teleportation => "teleportation",
            Regime::Window => "window",
            Regime::LocalExtraction => "local_extraction",
        }
    }

    /// Label from the thresholds; `T2 = None` means the window never closes.
    pub fn classify(kt: f64, t1: f64, t2: Option<f64>) -> Self {
        if kt < t1 {
            Regime::Teleportation
        } else if t2.is_none_or(|t2| kt < t2) {
            Regime::Window
        } else {
            Regime::LocalExtraction
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RegimePoint {
    pub kappa: f64,
    #[serde(rename = "kT")]
    pub kt: f64,
    pub regime: Option<Regime>,
    pub entangled: bool,
    /// Threshold solver failure for this kappa, if any.
    pub error: Option<String>,
}

/// Labels every grid point; thresholds are solved once per kappa.
pub fn classify_regimes(kappa_grid: &[f64], kt_grid: &[f64]) -> Result<Vec<RegimePoint>> {
    if let Some(k) = kappa_grid.iter().find(|k| !(**k > 0.0 && k.is_finite())) {
        return Err(QetError::Domain(format!(
            "regime map needs kappa > 0, got {k}"
        )));
    }
    let per_kappa: Vec<Result<Vec<RegimePoint>>> = kappa_grid
        .par_iter()
        .map(|&kappa| {
            let thr = thresholds(kappa).and_then(|t| match t.t1 {
                Some(t1) => Ok((t1, t.t2)),
                None => Err(QetError::Domain(format!("no T1 for kappa = {kappa}"))),
            });
            kt_grid
                .iter()
                .map(|&kt| {
                    let entangled = !is_separable(&SystemParams::new(kappa, kt)?)?;
                    let (regime, error) = match &thr {
                        Ok((t1, t2)) => (Some(Regime::classify(kt, *t1, *t2)), None),
                        Err(e) => (None, Some(e.to_string())),
                    };
                    Ok(RegimePoint {
                        kappa,
                        kt,
                        regime,
                        entangled,
                        error,
                    })
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for col in per_kappa {
        out.extend(col?);
    }
    Ok(out)
}

/// Point on a constant classical correlation contour.
#[derive(Debug, Clone, Serialize)]
pub struct ContourPoint {
    #[serde(rename = "C_target")]
    pub c_target: f64,
    #[serde(rename = "kT")]
    pub kt: f64,
    pub kappa: f64,
    pub classical: f64,
    #[serde(rename = "D")]
    pub discord: f64,
    #[serde(rename = "E_B")]
    pub e_b: f64,
    pub separable: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Contour {
    #[serde(rename = "C_target")]
    pub c_target: f64,
    /// Where the contour meets the separability boundary `kT = Te(kappa)`.
    pub anchor_kappa: f64,
    pub anchor_kt: f64,
    /// Ordered from the anchor with kT increasing.
    pub points: Vec<ContourPoint>,
    /// Skipped points and bracket choices.
    pub notes: Vec<String>,
}

pub const CONTOUR_KAPPA_RANGE: (f64, f64) = (1e-6, 50.0);
/// Residual bound on `|C - C_target|` for emitted points.
pub const CONTOUR_RESIDUAL: f64 = 1e-8;
const CONTOUR_SCAN_RATIO: f64 = 1.08;
const CONTOUR_SPAN: f64 = 30.0;
const CONTOUR_POINTS: usize = 40;
const KAPPA_TOL: f64 = 1e-14;

fn state_at(kappa: f64, kt: f64) -> Result<GibbsState> {
    gibbs_state(&SystemParams::new(kappa, kt)?)
}

fn classical_at(kappa: f64, kt: f64) -> f64 {
    state_at(kappa, kt)
        .map(|s| classical_correlation(&s))
        .unwrap_or(f64::NAN)
}

fn geometric(lo: f64, hi: f64, ratio: f64) -> Vec<f64> {
    let mut v = vec![lo];
    while *v.last().unwrap() < hi {
        v.push((v.last().unwrap() * ratio).min(hi));
    }
    v
}

/// All sign changes of `f` on the grid.
fn brackets(f: impl Fn(f64) -> f64, grid: &[f64]) -> Vec<Bracket> {
    let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    (1..grid.len())
        .filter(|&i| vals[i - 1].is_finite() && vals[i].is_finite() && vals[i - 1] * vals[i] <= 0.0)
        .map(|i| Bracket {
            lo: grid[i - 1],
            hi: grid[i],
            f_lo: vals[i - 1],
            f_hi: vals[i],
        })
        .collect()
}

/// Coupling where the separability boundary carries classical correlation `c_target`.
pub fn contour_anchor(c_target: f64) -> Result<(f64, f64)> {
    let on_boundary = |kappa: f64| -> f64 {
        match entanglement_threshold_te(kappa) {
            Ok(Some(te)) => classical_at(kappa, te) - c_target,
            _ => f64::NAN,
        }
    };
    let grid = geometric(1e-3, CONTOUR_KAPPA_RANGE.1, 1.2);
    let b = brackets(on_boundary, &grid)
        .into_iter()
        .next()
        .ok_or_else(|| {
            QetError::Domain(format!(
                "C = {c_target} never reached on the separability boundary"
            ))
        })?;
    let kappa = bisect(on_boundary, b, KAPPA_TOL)?;
    let te = entanglement_threshold_te(kappa)?.expect("kappa > 0");
    Ok((kappa, te))
}

fn check_target(c_target: f64) -> Result<()> {
    if !(c_target > 0.0 && c_target < 1.0) {
        return Err(QetError::Domain(format!(
            "C_target must lie in (0, 1), got {c_target}"
        )));
    }
    Ok(())
}

fn contour_point(c_target: f64, kappa: f64, kt: f64) -> Result<ContourPoint> {
    let s = state_at(kappa, kt)?;
    Ok(ContourPoint {
        c_target,
        kt,
        kappa,
        classical: classical_correlation(&s),
        discord: discord(&s),
        e_b: optimal_qet(&s)?.e_b_max,
        separable: separability_margin(kappa, kt)? >= -1e-12,
    })
}

/// Upper end of the default contour grid: `30 * anchor`, or lower where the
/// contour would need a coupling beyond the scanned range.
fn contour_kt_cap(c_target: f64, anchor_kt: f64) -> Result<f64> {
    let f = |kt: f64| classical_at(CONTOUR_KAPPA_RANGE.1, kt) - c_target;
    let hi = anchor_kt * CONTOUR_SPAN;
    if f(hi) >= 0.0 {
        return Ok(hi);
    }
    let root = bisect(f, Bracket::new(f, anchor_kt, hi)?, KAPPA_TOL)?;
    Ok(anchor_kt + (root - anchor_kt) * (1.0 - 1e-6))
}

/// Traces `C(kappa, kT) = c_target` through the separable region.
///
/// Without an explicit grid, kT runs log-spaced from the boundary anchor to
/// 30 times its value, or to where the solution leaves the coupling range. At each kT the coupling is bracketed on
/// `[1e-6, 50]` and bisected; entangled or unresolved points are skipped
/// and recorded in `notes`.
pub fn trace_constant_c_contour(c_target: f64, kt_grid: Option<&[f64]>) -> Result<Contour> {
    check_target(c_target)?;
    let (anchor_kappa, anchor_kt) = contour_anchor(c_target)?;
    let grid: Vec<f64> = match kt_grid {
        Some(g) => {
            let mut g: Vec<f64> = g.iter().copied().filter(|&t| t > anchor_kt).collect();
            g.sort_by(f64::total_cmp);
            g
        }
        None => GridSpec::log(
            anchor_kt,
            contour_kt_cap(c_target, anchor_kt)?,
            CONTOUR_POINTS,
        )
        .values()
        .into_iter()
        .skip(1)
        .collect(),
    };
    let kappa_grid = geometric(
        CONTOUR_KAPPA_RANGE.0,
        CONTOUR_KAPPA_RANGE.1,
        CONTOUR_SCAN_RATIO,
    );

    let solved: Vec<(f64, Vec<Bracket>)> = grid
        .par_iter()
        .map(|&kt| {
            (
                kt,
                brackets(|k| classical_at(k, kt) - c_target, &kappa_grid),
            )
        })
        .collect();

    let mut notes = Vec::new();
    let mut points = vec![contour_point(c_target, anchor_kappa, anchor_kt)?];
    let mut prev = anchor_kappa;
    for (kt, found) in solved {
        let Some(chosen) = found
            .iter()
            .min_by(|a, b| (a.lo - prev).abs().total_cmp(&(b.lo - prev).abs()))
            .copied()
        else {
            notes.push(format!(
                "C={c_target}: no coupling in range at kT={kt}; point omitted"
            ));
            continue;
        };
        if found.len() > 1 {
            notes.push(format!(
                "C={c_target}: C not monotone in kappa at kT={kt} ({} crossings); kept the one nearest kappa={prev}",
                found.len()
            ));
        }
        let kappa = bisect(|k| classical_at(k, kt) - c_target, chosen, KAPPA_TOL)?;
        let p = contour_point(c_target, kappa, kt)?;
        if (p.classical - c_target).abs() >= CONTOUR_RESIDUAL {
            notes.push(format!(
                "C={c_target}: residual {:e} at kT={kt}; point omitted",
                p.classical - c_target
            ));
            continue;
        }
        if !p.separable {
            notes.push(format!("C={c_target}: entangled at kT={kt}; point omitted"));
            continue;
        }
        prev = kappa;
        points.push(p);
    }
    Ok(Contour {
        c_target,
        anchor_kappa,
        anchor_kt,
        points,
        notes,
    })
}

/// `(D, E_B)` along the contour, starting at the separability anchor.
pub fn dissonance_energy_curve(c_target: f64) -> Result<Vec<(f64, f64)>> {
    Ok(trace_constant_c_contour(c_target, None)?
        .points
        .iter()
        .map(|p| (p.discord, p.e_b))
        .collect())
}

pub const DEFAULT_FIGURE_KAPPAS: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];
pub const DEFAULT_C_TARGETS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

pub fn default_kt_grid() -> Vec<f64> {
    GridSpec::log(0.01, 20.0, 200).values()
}

pub fn default_regime_kappas() -> Vec<f64> {
    GridSpec::log(0.05, 10.0, 60).values()
}

/// Overrides for figure datasets; `None` selects the defaults.
#[derive(Debug, Clone, Default)]
pub struct FigureConfig {
    pub kappa_values: Option<Vec<f64>>,
    pub kt_values: Option<Vec<f64>>,
    pub c_targets: Option<Vec<f64>>,
}

impl FigureConfig {
    fn kappas(&self) -> Vec<f64> {
        self.kappa_values
            .clone()
            .unwrap_or_else(|| DEFAULT_FIGURE_KAPPAS.to_vec())
    }

    fn kts(&self) -> Vec<f64> {
        self.kt_values.clone().unwrap_or_else(default_kt_grid)
    }

    fn targets(&self) -> Vec<f64> {
        self.c_targets
            .clone()
            .unwrap_or_else(|| DEFAULT_C_TARGETS.to_vec())
    }
}

/// Figure dataset with one curve per kappa; `marker` optionally inserts a
/// flagged row at a per-kappa threshold.
fn curve_table(
    cfg: &FigureConfig,
    value_col: &str,
    marker: Option<(&str, fn(f64) -> Result<Option<f64>>)>,
    value: fn(&GibbsState) -> Result<f64>,
) -> Result<Table> {
    let mut cols = vec!["kappa", "kT", value_col];
    if let Some((flag, _)) = marker {
        cols.push(flag);
    }
    let kts = cfg.kts();
    let per_kappa: Vec<Result<Vec<Vec<Cell>>>> = cfg
        .kappas()
        .par_iter()
        .map(|&kappa| {
            let mut pts: Vec<(f64, bool)> = kts.iter().map(|&t| (t, false)).collect();
            if let Some((_, solve)) = marker {
                if let Some(t) = solve(kappa)? {
                    pts.push((t, true));
                    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
                }
            }
            pts.into_iter()
                .map(|(kt, flagged)| {
                    let v = value(&state_at(kappa, kt)?)?;
                    let mut row = vec![Cell::Num(kappa), Cell::Num(kt), Cell::Num(v)];
                    if marker.is_some() {
                        row.push(Cell::Int(flagged as i64));
                    }
                    Ok(row)
                })
                .collect()
        })
        .collect();
    let mut t = Table::new(&cols);
    for rows in per_kappa {
        rows?.into_iter().for_each(|r| t.push(r));
    }
    Ok(t)
}

/// Discord vs kT, with the separability temperature flagged.
pub fn figure1(cfg: &FigureConfig) -> Result<Table> {
    curve_table(
        cfg,
        "discord",
        Some(("Te_flag", entanglement_threshold_te)),
        |s| Ok(discord(s)),
    )
}

/// Maximal teleported energy vs kT.
pub fn figure2(cfg: &FigureConfig) -> Result<Table> {
    curve_table(cfg, "E_B", None, |s| Ok(optimal_qet(s)?.e_b_max))
}

/// Best local extraction vs kT, with T1 flagged.
pub fn figure3(cfg: &FigureConfig) -> Result<Table> {
    curve_table(
        cfg,
        "omega_max",
        Some(("T1_flag", crate::local_extraction::threshold_t1)),
        |s| Ok(solve_max_omega(s).omega_max),
    )
}

/// Regime map: per-kappa thresholds and band edges over `[kT_lo, kT_hi]`.
pub fn figure4(cfg: &FigureConfig) -> Result<Table> {
    let kappas = cfg
        .kappa_values
        .clone()
        .unwrap_or_else(default_regime_kappas);
    let kts = cfg.kts();
    let (lo, hi) = (kts[0], *kts.last().unwrap());
    let rows: Vec<Result<Vec<Cell>>> = kappas
        .par_iter()
        .map(|&kappa| {
            let t = thresholds(kappa)?;
            let t1 =
                t.t1.ok_or_else(|| QetError::Domain(format!("no T1 for kappa = {kappa}")))?;
            let t2 = t.t2.unwrap_or(f64::INFINITY);
            let clip = |x: f64| x.clamp(lo, hi);
            Ok(vec![
                kappa.into(),
                t1.into(),
                t.t2.into(),
                t.te.into(),
                lo.into(),
                clip(t1).into(),
                clip(t1).into(),
                clip(t2).into(),
                clip(t2).into(),
                hi.into(),
            ])
        })
        .collect();
    let mut table = Table::new(&[
        "kappa",
        "T1",
        "T2",
        "Te",
        "teleportation_lo",
        "teleportation_hi",
        "window_lo",
        "window_hi",
        "local_extraction_lo",
        "local_extraction_hi",
    ]);
    for r in rows {
        table.push(r?);
    }
    Ok(table)
}

/// Constant-C contours (`series = contour`) and the separability boundary
/// `kT = Te(kappa)` (`series = boundary`).
pub fn figure5(cfg: &FigureConfig) -> Result<(Table, Vec<String>)> {
    let mut table = Table::new(&[
        "series",
        "C_target",
        "kappa",
        "kT",
        "classical",
        "separable",
    ]);
    let contours: Vec<Result<Contour>> = cfg
        .targets()
        .par_iter()
        .map(|&c| trace_constant_c_contour(c, cfg.kt_values.as_deref()))
        .collect();
    let mut notes = Vec::new();
    for c in contours {
        let c = c?;
        for p in &c.points {
            table.push(vec![
                "contour".into(),
                p.c_target.into(),
                p.kappa.into(),
                p.kt.into(),
                p.classical.into(),
                p.separable.into(),
            ]);
        }
        notes.extend(c.notes);
    }
    let kappas = cfg
        .kappa_values
        .clone()
        .unwrap_or_else(|| GridSpec::log(0.05, 20.0, 60).values());
    let boundary: Vec<Result<Vec<Cell>>> = kappas
        .par_iter()
        .map(|&kappa| {
            let te = entanglement_threshold_te(kappa)?
                .ok_or_else(|| QetError::Domain("kappa = 0 has no separability boundary".into()))?;
            Ok(vec![
                "boundary".into(),
                Cell::Empty,
                kappa.into(),
                te.into(),
                classical_at(kappa, te).into(),
                true.into(),
            ])
        })
        .collect();
    for r in boundary {
        table.push(r?);
    }
    Ok((table, notes))
}

/// Teleported energy against discord along each constant-C contour.
pub fn figure6(cfg: &FigureConfig) -> Result<(Table, Vec<String>)> {
    let mut table = Table::new(&["C_target", "kT", "kappa", "discord", "E_B"]);
    let contours: Vec<Result<Contour>> = cfg
        .targets()
        .par_iter()
        .map(|&c| trace_constant_c_contour(c, cfg.kt_values.as_deref()))
        .collect();
    let mut notes = Vec::new();
    for c in contours {
        let c = c?;
        for p in &c.points {
            table.push(vec![
                p.c_target.into(),
                p.kt.into(),
                p.kappa.into(),
                p.discord.into(),
                p.e_b.into(),
            ]);
        }
        notes.extend(c.notes);
    }
    Ok((table, notes))
}

/// Dataset and diagnostic notes for figure `n`.
pub fn figure(n: u8, cfg: &FigureConfig) -> Result<(Table, Vec<String>)> {
    match n {
        1 => Ok((figure1(cfg)?, vec![])),
        2 => Ok((figure2(cfg)?, vec![])),
        3 => Ok((figure3(cfg)?, vec![])),
        4 => Ok((figure4(cfg)?, vec![])),
        5 => figure5(cfg),
        6 => figure6(cfg),
        _ => Err(QetError::Domain(format!(
            "figure number must be 1..6, got {n}"
        ))),
    }
}
