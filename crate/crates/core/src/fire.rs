//! Forest-fire meteorological records: parsing, splitting and scaling.
//!
//! The table layout is the public forest-fires benchmark: spatial grid
//! coordinates, month and weekday tokens, the four fire-weather-index codes,
//! weather readings and the burned area in hectares.

use ndarray::{Array1, Array2, Axis};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng;

pub const COLUMNS: [&str; 13] = [
    "X", "Y", "month", "day", "FFMC", "DMC", "DC", "ISI", "temp", "RH", "wind", "rain", "area",
];

pub const FEATURES: [&str; 12] = [
    "X", "Y", "month", "day", "FFMC", "DMC", "DC", "ISI", "temp", "RH", "wind", "rain",
];

const MONTHS: [&str; 12] = [
    "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec",
];
const DAYS: [&str; 7] = ["mon", "tue", "wed", "thu", "fri", "sat", "sun"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("line {line}, column '{column}': {message}")]
    Parse {
        line: usize,
        column: String,
        message: String,
    },
    #[error("dataset too small: {0}")]
    TooSmall(String),
    #[error("invalid split fraction {0}; must lie strictly between 0 and 1")]
    Fraction(f64),
    #[error("scaler used before fit")]
    NotFitted,
    #[error("shape error: {0}")]
    Shape(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FireRecord {
    pub x: i32,
    pub y: i32,
    pub month: u8,
    pub day: u8,
    pub ffmc: f64,
    pub dmc: f64,
    pub dc: f64,
    pub isi: f64,
    pub temp: f64,
    pub rh: f64,
    pub wind: f64,
    pub rain: f64,
    pub area: f64,
}

impl FireRecord {
    fn check(&self) -> Result<(), (&'static str, String)> {
        if !(1..=12).contains(&self.month) {
            return Err(("month", format!("month {} outside 1-12", self.month)));
        }
        if !(1..=7).contains(&self.day) {
            return Err(("day", format!("day {} outside 1-7", self.day)));
        }
        if !(0.0..=100.0).contains(&self.rh) {
            return Err(("RH", format!("relative humidity {} outside 0-100", self.rh)));
        }
        if !(self.area >= 0.0) {
            return Err(("area", format!("burned area {} is negative", self.area)));
        }
        if !(self.rain >= 0.0) {
            return Err(("rain", format!("rain {} is negative", self.rain)));
        }
        Ok(())
    }

    fn ordinal_features(&self) -> [f64; 12] {
        [
            f64::from(self.x),
            f64::from(self.y),
            f64::from(self.month),
            f64::from(self.day),
            self.ffmc,
            self.dmc,
            self.dc,
            self.isi,
            self.temp,
            self.rh,
            self.wind,
            self.rain,
        ]
    }
}

/// How month and weekday enter the feature matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CalendarEncoding {
    #[default]
    Ordinal,
    OneHot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetTransform {
    #[default]
    Raw,
    /// `ln(1 + area)`
    Log1p,
}

impl TargetTransform {
    pub fn apply(self, area: f64) -> f64 {
        match self {
            Self::Raw => area,
            Self::Log1p => area.ln_1p(),
        }
    }

    pub fn invert(self, value: f64) -> f64 {
        match self {
            Self::Raw => value,
            Self::Log1p => value.exp_m1(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FireDataset {
    records: Vec<FireRecord>,
    provenance: Provenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitConfig {
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            test_fraction: 0.6,
            seed: rng::DEFAULT_SEED,
        }
    }
}

fn parse_token(table: &[&str], token: &str) -> Option<u8> {
    let lower = token.to_ascii_lowercase();
    table
        .iter()
        .position(|t| *t == lower)
        .map(|p| p as u8 + 1)
}

/// Parses the comma-separated table; header names are matched
/// case-insensitively and may appear in any order.
pub fn parse_dataset(text: &str, source: &str) -> Result<FireDataset, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| DataError::Schema(e.to_string()))?
        .clone();
    let mut index = [0usize; 13];
    for (slot, name) in index.iter_mut().zip(COLUMNS) {
        *slot = header
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| DataError::Schema(format!("missing column '{name}'")))?;
    }

    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| DataError::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            column: String::new(),
            message: e.to_string(),
        })?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let cell = |k: usize| row.get(index[k]).unwrap_or_default();
        let err = |k: usize, message: String| DataError::Parse {
            line,
            column: COLUMNS[k].to_owned(),
            message,
        };
        let int = |k: usize| {
            cell(k)
                .parse::<i32>()
                .map_err(|_| err(k, format!("'{}' is not an integer", cell(k))))
        };
        let real = |k: usize| {
            cell(k)
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(k, format!("'{}' is not a finite number", cell(k))))
        };
        let month = parse_token(&MONTHS, cell(2))
            .ok_or_else(|| err(2, format!("unknown month '{}'", cell(2))))?;
        let day =
            parse_token(&DAYS, cell(3)).ok_or_else(|| err(3, format!("unknown day '{}'", cell(3))))?;
        let record = FireRecord {
            x: int(0)?,
            y: int(1)?,
            month,
            day,
            ffmc: real(4)?,
            dmc: real(5)?,
            dc: real(6)?,
            isi: real(7)?,
            temp: real(8)?,
            rh: real(9)?,
            wind: real(10)?,
            rain: real(11)?,
            area: real(12)?,
        };
        record.check().map_err(|(column, message)| DataError::Parse {
            line,
            column: column.to_owned(),
            message,
        })?;
        records.push(record);
    }
    Ok(FireDataset::from_records(records, source))
}

impl FireDataset {
    pub fn from_records(records: Vec<FireRecord>, source: &str) -> Self {
        let rows = records.len();
        Self {
            records,
            provenance: Provenance {
                source: source.to_owned(),
                rows,
            },
        }
    }

    pub fn records(&self) -> &[FireRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Writes the canonical header and lowercase calendar tokens.
    pub fn to_csv(&self) -> String {
        let mut out = COLUMNS.join(",");
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.x,
                r.y,
                MONTHS[usize::from(r.month) - 1],
                DAYS[usize::from(r.day) - 1],
                r.ffmc,
                r.dmc,
                r.dc,
                r.isi,
                r.temp,
                r.rh,
                r.wind,
                r.rain,
                r.area
            ));
        }
        out
    }

    /// Seeded shuffle-and-cut into `(train, test)`.
    pub fn split(&self, cfg: &SplitConfig) -> Result<(FireDataset, FireDataset), DataError> {
        let n = self.records.len();
        if n < 2 {
            return Err(DataError::TooSmall(format!("{n} records; a split needs at least 2")));
        }
        if !(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0) {
            return Err(DataError::Fraction(cfg.test_fraction));
        }
        let n_test = ((cfg.test_fraction * n as f64).round() as usize).clamp(1, n - 1);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng::stream(cfg.seed, 0));
        let (test_idx, train_idx) = order.split_at(n_test);
        let pick = |idx: &[usize], part: &str| {
            let mut idx = idx.to_vec();
            idx.sort_unstable();
            FireDataset::from_records(
                idx.iter().map(|&i| self.records[i]).collect(),
                &format!("{} [{part}]", self.provenance.source),
            )
        };
        Ok((pick(train_idx, "train"), pick(test_idx, "test")))
    }

    pub fn feature_matrix(&self, encoding: CalendarEncoding) -> Array2<f64> {
        let names = feature_names(encoding);
        let mut m = Array2::zeros((self.records.len(), names.len()));
        for (mut row, r) in m.axis_iter_mut(Axis(0)).zip(&self.records) {
            let f = r.ordinal_features();
            match encoding {
                CalendarEncoding::Ordinal => {
                    row.iter_mut().zip(f).for_each(|(dst, v)| *dst = v);
                }
                CalendarEncoding::OneHot => {
                    row[0] = f[0];
                    row[1] = f[1];
                    row[2 + usize::from(r.month) - 1] = 1.0;
                    row[14 + usize::from(r.day) - 1] = 1.0;
                    for k in 4..12 {
                        row[21 + k - 4] = f[k];
                    }
                }
            }
        }
        m
    }

    pub fn targets(&self, transform: TargetTransform) -> Array1<f64> {
        self.records.iter().map(|r| transform.apply(r.area)).collect()
    }
}

pub fn feature_names(encoding: CalendarEncoding) -> Vec<String> {
    match encoding {
        CalendarEncoding::Ordinal => FEATURES.iter().map(|s| s.to_string()).collect(),
        CalendarEncoding::OneHot => {
            let mut names = vec!["X".to_string(), "Y".to_string()];
            names.extend(MONTHS.iter().map(|m| format!("month_{m}")));
            names.extend(DAYS.iter().map(|d| format!("day_{d}")));
            names.extend(FEATURES[4..].iter().map(|s| s.to_string()));
            names
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalerKind {
    /// `(v − min) / (max − min)`, constant columns map to 0.
    #[default]
    MinMax,
    /// `(v − mean) / std`, constant columns map to 0.
    ZScore,
}

/// Per-column affine scaler fitted on training rows only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    kind: ScalerKind,
    /// `(offset, range)` per column; `range == 0` marks a constant column.
    params: Option<Vec<(f64, f64)>>,
}

impl Scaler {
    pub fn new(kind: ScalerKind) -> Self {
        Self { kind, params: None }
    }

    pub fn kind(&self) -> ScalerKind {
        self.kind
    }

    pub fn is_fitted(&self) -> bool {
        self.params.is_some()
    }

    /// Column `(min, max)` for a min-max scaler, `(mean, std)` for z-score.
    pub fn params(&self) -> Option<&[(f64, f64)]> {
        self.params.as_deref()
    }

    pub fn fit(&mut self, data: &Array2<f64>) -> Result<&mut Self, DataError> {
        if data.nrows() == 0 {
            return Err(DataError::TooSmall("cannot fit a scaler on zero rows".into()));
        }
        let params = data
            .axis_iter(Axis(1))
            .map(|col| match self.kind {
                ScalerKind::MinMax => {
                    let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    (lo, hi)
                }
                ScalerKind::ZScore => {
                    let n = col.len() as f64;
                    let mean = col.sum() / n;
                    let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
                    (mean, var.sqrt())
                }
            })
            .collect();
        self.params = Some(params);
        Ok(self)
    }

    fn column_map(&self, j: usize) -> Result<(f64, f64), DataError> {
        let params = self.params.as_ref().ok_or(DataError::NotFitted)?;
        let (a, b) = params[j];
        Ok(match self.kind {
            ScalerKind::MinMax => (a, b - a),
            ScalerKind::ZScore => (a, b),
        })
    }

    fn check_width(&self, data: &Array2<f64>) -> Result<(), DataError> {
        let params = self.params.as_ref().ok_or(DataError::NotFitted)?;
        if data.ncols() != params.len() {
            return Err(DataError::Shape(format!(
                "scaler fitted on {} columns, got {}",
                params.len(),
                data.ncols()
            )));
        }
        Ok(())
    }

    /// Scales without clamping: unseen values may leave `[0, 1]`.
    pub fn transform(&self, data: &Array2<f64>) -> Result<Array2<f64>, DataError> {
        self.check_width(data)?;
        let mut out = data.clone();
        for (j, mut col) in out.axis_iter_mut(Axis(1)).enumerate() {
            let (offset, range) = self.column_map(j)?;
            col.mapv_inplace(|v| if range > 0.0 { (v - offset) / range } else { 0.0 });
        }
        Ok(out)
    }

    pub fn inverse_transform(&self, data: &Array2<f64>) -> Result<Array2<f64>, DataError> {
        self.check_width(data)?;
        let mut out = data.clone();
        for (j, mut col) in out.axis_iter_mut(Axis(1)).enumerate() {
            let (offset, range) = self.column_map(j)?;
            col.mapv_inplace(|v| offset + v * range);
        }
        Ok(out)
    }

    /// Inverse map of a single column.
    pub fn inverse_column(&self, column: usize, values: &Array1<f64>) -> Result<Array1<f64>, DataError> {
        let (offset, range) = self.column_map(column)?;
        Ok(values.mapv(|v| offset + v * range))
    }
}

/// Fits a min-max scaler on `train`.
pub fn fit_scaler(train: &Array2<f64>) -> Result<Scaler, DataError> {
    let mut s = Scaler::new(ScalerKind::MinMax);
    s.fit(train)?;
    Ok(s)
}

pub fn apply_scaler(scaler: &Scaler, data: &Array2<f64>) -> Result<Array2<f64>, DataError> {
    scaler.transform(data)
}

/// Comma-separated dump of a matrix with a header row and optional trailing
/// string column.
pub fn matrix_to_csv(names: &[String], data: &Array2<f64>, extra: Option<(&str, &[&str])>) -> String {
    let mut out = names.join(",");
    if let Some((name, _)) = extra {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (i, row) in data.axis_iter(Axis(0)).enumerate() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&cells.join(","));
        if let Some((_, values)) = extra {
            out.push(',');
            out.push_str(values[i]);
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    const SAMPLE: &str = "X,Y,month,day,FFMC,DMC,DC,ISI,temp,RH,wind,rain,area
7,5,mar,fri,86.2,26.2,94.3,5.1,8.2,51,6.7,0,0
7,4,oct,tue,90.6,35.4,669.1,6.7,18,33,0.9,0,0
6,5,aug,sun,92.1,111.2,654.1,9.6,20.4,42,4,0,1.56
";

    #[test]
    fn parses_calendar_tokens() {
        let ds = parse_dataset(SAMPLE, "sample").unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.records()[0].month, 3);
        assert_eq!(ds.records()[0].day, 5);
        assert_eq!(ds.records()[2].day, 7);
        assert_eq!(ds.provenance().rows, 3);
    }

    #[test]
    fn header_is_case_insensitive() {
        let text = SAMPLE.replacen("X,Y,month", "x,y,MONTH", 1);
        assert_eq!(parse_dataset(&text, "s").unwrap().len(), 3);
    }

    #[test]
    fn rejects_bad_rows() {
        let text = SAMPLE.replace("oct", "foo");
        let err = parse_dataset(&text, "s").unwrap_err();
        assert!(matches!(err, DataError::Parse { line: 3, ref column, .. } if column == "month"), "{err:?}");
        let text = SAMPLE.replace("86.2", "abc");
        assert!(matches!(parse_dataset(&text, "s"), Err(DataError::Parse { line: 2, .. })));
        let text = SAMPLE.replace(",rain,", ",drizzle,");
        assert!(matches!(parse_dataset(&text, "s"), Err(DataError::Schema(_))));
        let text = SAMPLE.replace(",0,1.56", ",0,-1");
        assert!(matches!(parse_dataset(&text, "s"), Err(DataError::Parse { .. })));
    }

    #[test]
    fn split_sizes() {
        let ds = parse_dataset(SAMPLE, "s").unwrap();
        let (train, test) = ds
            .split(&SplitConfig {
                test_fraction: 0.6,
                seed: 1,
            })
            .unwrap();
        assert_eq!((train.len(), test.len()), (1, 2));
        let one = FireDataset::from_records(vec![ds.records()[0]], "one");
        assert!(matches!(one.split(&SplitConfig::default()), Err(DataError::TooSmall(_))));
        assert!(matches!(
            ds.split(&SplitConfig { test_fraction: 1.0, seed: 1 }),
            Err(DataError::Fraction(_))
        ));
    }

    #[test]
    fn scaler_examples() {
        let col = array![[0.0], [5.0], [10.0]];
        let s = fit_scaler(&col).unwrap();
        assert_eq!(apply_scaler(&s, &col).unwrap(), array![[0.0], [0.5], [1.0]]);

        let constant = array![[7.0], [7.0], [7.0]];
        let s = fit_scaler(&constant).unwrap();
        assert_eq!(apply_scaler(&s, &constant).unwrap(), array![[0.0], [0.0], [0.0]]);

        let s = fit_scaler(&array![[0.0], [10.0]]).unwrap();
        let out = apply_scaler(&s, &array![[12.0]]).unwrap();
        assert!((out[[0, 0]] - 1.2).abs() < 1e-15);
    }

    #[test]
    fn transform_before_fit_is_an_error() {
        let s = Scaler::new(ScalerKind::MinMax);
        assert_eq!(s.transform(&array![[1.0]]).unwrap_err(), DataError::NotFitted);
    }

    #[test]
    fn zscore_and_inverse() {
        let data = array![[1.0, 3.0], [3.0, 3.0]];
        let mut s = Scaler::new(ScalerKind::ZScore);
        s.fit(&data).unwrap();
        let z = s.transform(&data).unwrap();
        assert_eq!(z, array![[-1.0, 0.0], [1.0, 0.0]]);
        let back = s.inverse_transform(&z).unwrap();
        assert_eq!(back[[0, 0]], 1.0);
    }

    #[test]
    fn one_hot_layout() {
        let ds = parse_dataset(SAMPLE, "s").unwrap();
        let m = ds.feature_matrix(CalendarEncoding::OneHot);
        let names = feature_names(CalendarEncoding::OneHot);
        assert_eq!(m.ncols(), names.len());
        assert_eq!(m.ncols(), 29);
        let march = names.iter().position(|n| n == "month_mar").unwrap();
        let fri = names.iter().position(|n| n == "day_fri").unwrap();
        assert_eq!(m[[0, march]], 1.0);
        assert_eq!(m[[0, fri]], 1.0);
        assert_eq!(m.row(0).sum(), 7.0 + 5.0 + 2.0 + 86.2 + 26.2 + 94.3 + 5.1 + 8.2 + 51.0 + 6.7);
        let ffmc = names.iter().position(|n| n == "FFMC").unwrap();
        assert_eq!(m[[1, ffmc]], 90.6);
    }

    #[test]
    fn log_target_round_trips() {
        let t = TargetTransform::Log1p;
        assert!((t.invert(t.apply(12.5)) - 12.5).abs() < 1e-12);
        assert_eq!(TargetTransform::Raw.apply(3.0), 3.0);
    }
}
