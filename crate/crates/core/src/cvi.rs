//! Content-validity indices for expert relevance ratings.
//!
//! Experts rate each item on a four-point relevance scale (1 = not relevant,
//! 2 = somewhat relevant, 3 = quite relevant, 4 = highly relevant). Ratings
//! of 3 or 4 count as agreement that the item is relevant.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Proportion of the panel that must agree for an item to be valid.
pub const DEFAULT_AGREEMENT_PROPORTION: f64 = 0.778;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CviError {
    #[error("panel must contain at least one expert")]
    InvalidPanel,
    #[error("matrix must contain at least one item")]
    NoItems,
    #[error("agreement proportion {0} outside (0, 1]")]
    InvalidProportion(f64),
    #[error("required agreement {required} exceeds panel size {experts}")]
    RequiredTooLarge { required: usize, experts: usize },
    #[error("rating {value} for item '{item}', expert {expert} is outside the 1-4 scale")]
    MalformedRating {
        item: String,
        expert: usize,
        value: i64,
    },
    #[error("item '{item}' has {found} ratings, expected {expected}")]
    RaggedRow {
        item: String,
        expected: usize,
        found: usize,
    },
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

/// Items × experts grid of four-point ratings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingMatrix {
    items: Vec<String>,
    experts: Vec<String>,
    ratings: Vec<Vec<u8>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemValidity {
    pub item: String,
    pub agreement_count: usize,
    pub i_cvi: f64,
    pub universal_agreement: bool,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub experts: usize,
    pub required_agreement: usize,
    pub threshold_proportion: f64,
    pub per_item: Vec<ItemValidity>,
    pub s_cvi_average: f64,
    pub s_cvi_ua: f64,
    pub universal_agreement_count: usize,
}

impl RatingMatrix {
    /// Builds a matrix, checking shape and that every cell is on the 1-4 scale.
    pub fn new(
        items: Vec<String>,
        experts: Vec<String>,
        ratings: Vec<Vec<i64>>,
    ) -> Result<Self, CviError> {
        if experts.is_empty() {
            return Err(CviError::InvalidPanel);
        }
        if items.is_empty() {
            return Err(CviError::NoItems);
        }
        if ratings.len() != items.len() {
            return Err(CviError::RaggedRow {
                item: format!("<{} rows>", ratings.len()),
                expected: items.len(),
                found: ratings.len(),
            });
        }
        let mut grid = Vec::with_capacity(items.len());
        for (item, row) in items.iter().zip(ratings) {
            if row.len() != experts.len() {
                return Err(CviError::RaggedRow {
                    item: item.clone(),
                    expected: experts.len(),
                    found: row.len(),
                });
            }
            grid.push(checked_row(item, &row)?);
        }
        Ok(Self {
            items,
            experts,
            ratings: grid,
        })
    }

    /// Reads the comma-separated survey layout: a header of expert labels
    /// (the first header cell names the item column) followed by one row per
    /// item, label first.
    pub fn from_csv(text: &str) -> Result<Self, CviError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = reader.headers().map_err(|e| CviError::Parse {
            line: 1,
            column: 0,
            message: e.to_string(),
        })?;
        let experts: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
        if experts.is_empty() {
            return Err(CviError::InvalidPanel);
        }
        let mut items = Vec::new();
        let mut ratings = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| CviError::Parse {
                line: e.position().map_or(0, |p| p.line() as usize),
                column: 0,
                message: e.to_string(),
            })?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            if record.iter().all(str::is_empty) {
                continue;
            }
            let label = record.get(0).unwrap_or_default().to_owned();
            if label.is_empty() {
                return Err(CviError::Parse {
                    line,
                    column: 1,
                    message: "missing item label".into(),
                });
            }
            if record.len() != experts.len() + 1 {
                return Err(CviError::Parse {
                    line,
                    column: record.len(),
                    message: format!(
                        "expected {} ratings, found {}",
                        experts.len(),
                        record.len().saturating_sub(1)
                    ),
                });
            }
            let mut row = Vec::with_capacity(experts.len());
            for (col, cell) in record.iter().enumerate().skip(1) {
                if cell.is_empty() {
                    return Err(CviError::Parse {
                        line,
                        column: col + 1,
                        message: format!("empty rating for item '{label}'"),
                    });
                }
                let value: i64 = cell.parse().map_err(|_| CviError::Parse {
                    line,
                    column: col + 1,
                    message: format!("rating '{cell}' is not an integer"),
                })?;
                row.push(value);
            }
            items.push(label);
            ratings.push(row);
        }
        Self::new(items, experts, ratings)
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn experts(&self) -> &[String] {
        &self.experts
    }

    pub fn ratings(&self) -> &[Vec<u8>] {
        &self.ratings
    }
}

fn checked_row(item: &str, row: &[i64]) -> Result<Vec<u8>, CviError> {
    row.iter()
        .enumerate()
        .map(|(expert, &value)| {
            if (1..=4).contains(&value) {
                Ok(value as u8)
            } else {
                Err(CviError::MalformedRating {
                    item: item.to_owned(),
                    expert,
                    value,
                })
            }
        })
        .collect()
}

fn round_to(value: f64, decimals: usize) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    (value * scale).round() / scale
}

/// Smallest agreement count whose I-CVI, at the three decimals it is reported
/// with, reaches `threshold_proportion`.
///
/// For nine experts and 0.778 this is 7, i.e. two dissenting ratings are
/// tolerated; 0.778 is 7/9 rounded.
pub fn required_agreement(n_experts: usize, threshold_proportion: f64) -> Result<usize, CviError> {
    if n_experts == 0 {
        return Err(CviError::InvalidPanel);
    }
    if !(threshold_proportion > 0.0 && threshold_proportion <= 1.0) {
        return Err(CviError::InvalidProportion(threshold_proportion));
    }
    let k = (1..=n_experts)
        .find(|&k| {
            round_to(k as f64 / n_experts as f64, crate::tolerances::REPORT_DECIMALS)
                >= threshold_proportion - 1e-12
        })
        .unwrap_or(n_experts);
    Ok(k)
}

/// Scores one item's ratings against the required agreement count.
pub fn compute_item_cvi(
    item: &str,
    ratings: &[i64],
    required: usize,
) -> Result<ItemValidity, CviError> {
    if ratings.is_empty() {
        return Err(CviError::InvalidPanel);
    }
    if required > ratings.len() {
        return Err(CviError::RequiredTooLarge {
            required,
            experts: ratings.len(),
        });
    }
    let row = checked_row(item, ratings)?;
    Ok(score_row(item, &row, required))
}

fn score_row(item: &str, row: &[u8], required: usize) -> ItemValidity {
    let agreement_count = row.iter().filter(|&&r| r >= 3).count();
    ItemValidity {
        item: item.to_owned(),
        agreement_count,
        i_cvi: agreement_count as f64 / row.len() as f64,
        universal_agreement: agreement_count == row.len(),
        valid: agreement_count >= required,
    }
}

/// Item-level and scale-level indices for the whole matrix.
pub fn compute_scale_cvi(
    matrix: &RatingMatrix,
    threshold_proportion: f64,
) -> Result<ValidityReport, CviError> {
    let n_experts = matrix.experts.len();
    let required = required_agreement(n_experts, threshold_proportion)?;
    let per_item: Vec<ItemValidity> = matrix
        .items
        .iter()
        .zip(&matrix.ratings)
        .map(|(item, row)| score_row(item, row, required))
        .collect();
    let n_items = per_item.len() as f64;
    let s_cvi_average = per_item.iter().map(|v| v.i_cvi).sum::<f64>() / n_items;
    let universal_agreement_count = per_item.iter().filter(|v| v.universal_agreement).count();
    Ok(ValidityReport {
        experts: n_experts,
        required_agreement: required,
        threshold_proportion,
        per_item,
        s_cvi_average,
        s_cvi_ua: universal_agreement_count as f64 / n_items,
        universal_agreement_count,
    })
}

impl ValidityReport {
    /// Fixed-width listing, one line per item.
    pub fn to_text(&self) -> String {
        let width = self
            .per_item
            .iter()
            .map(|v| v.item.chars().count())
            .max()
            .unwrap_or(4)
            .max(4);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<width$}  {:>9}  {:>6}  validation",
            "Item", "Agreement", "I-CVI"
        );
        for v in &self.per_item {
            let _ = writeln!(
                out,
                "{:<width$}  {:>9}  {:>6.3}  {}",
                v.item,
                v.agreement_count,
                v.i_cvi,
                if v.valid { "VALID" } else { "INVALID" }
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "experts: {}, required agreement: {}", self.experts, self.required_agreement);
        let _ = writeln!(out, "S-CVI/Average: {:.3}", self.s_cvi_average);
        let _ = writeln!(out, "Universal agreement: {}", self.universal_agreement_count);
        let _ = writeln!(out, "S-CVI/UA: {:.3}", self.s_cvi_ua);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn required_agreement_examples() {
        assert_eq!(required_agreement(9, 0.778).unwrap(), 7);
        assert_eq!(required_agreement(1, 0.778).unwrap(), 1);
        assert_eq!(required_agreement(20, 0.778).unwrap(), 16);
        assert_eq!(required_agreement(0, 0.778), Err(CviError::InvalidPanel));
        assert!(required_agreement(5, 0.0).is_err());
        assert_eq!(required_agreement(5, 1.0).unwrap(), 5);
    }

    #[test]
    fn item_examples() {
        let v = compute_item_cvi("Analytics of events", &[4, 3, 4, 3, 4, 4, 3, 3, 4], 7).unwrap();
        assert_eq!(v.agreement_count, 9);
        assert_eq!(v.i_cvi, 1.0);
        assert!(v.valid);

        let v = compute_item_cvi("Personalization of task", &[2, 3, 2, 3, 4, 1, 3, 2, 4], 7).unwrap();
        assert_eq!(v.agreement_count, 5);
        assert_eq!(format!("{:.3}", v.i_cvi), "0.556");
        assert!(!v.valid);

        let v = compute_item_cvi("x", &[1, 1, 1], 3).unwrap();
        assert_eq!(v.agreement_count, 0);
        assert_eq!(v.i_cvi, 0.0);
        assert!(!v.valid);
    }

    #[test]
    fn malformed_rating_names_coordinates() {
        let err = compute_item_cvi("Item A", &[4, 5, 3], 2).unwrap_err();
        assert_eq!(
            err,
            CviError::MalformedRating {
                item: "Item A".into(),
                expert: 1,
                value: 5
            }
        );
        let err = RatingMatrix::new(
            vec!["a".into(), "b".into()],
            vec!["E1".into(), "E2".into()],
            vec![vec![4, 4], vec![0, 3]],
        )
        .unwrap_err();
        assert!(matches!(err, CviError::MalformedRating { ref item, expert: 0, value: 0 } if item == "b"));
    }

    #[test]
    fn scale_examples() {
        let m = RatingMatrix::new(
            vec!["a".into(), "b".into()],
            vec!["E1".into(), "E2".into(), "E3".into()],
            vec![vec![4, 4, 4], vec![4, 4, 4]],
        )
        .unwrap();
        let r = compute_scale_cvi(&m, 0.778).unwrap();
        assert_eq!(r.s_cvi_average, 1.0);
        assert_eq!(r.s_cvi_ua, 1.0);

        let m = RatingMatrix::new(
            vec!["a".into(), "b".into()],
            vec!["E1".into(), "E2".into()],
            vec![vec![3, 4], vec![4, 1]],
        )
        .unwrap();
        let r = compute_scale_cvi(&m, 0.778).unwrap();
        assert_eq!(r.per_item[1].i_cvi, 0.5);
        assert_eq!(r.s_cvi_average, 0.75);
        assert_eq!(r.s_cvi_ua, 0.5);
    }

    #[test]
    fn csv_rejects_empty_cells_and_text() {
        let err = RatingMatrix::from_csv("Roles,E1,E2\nA,4,\n").unwrap_err();
        assert!(matches!(err, CviError::Parse { line: 2, column: 3, .. }), "{err:?}");
        let err = RatingMatrix::from_csv("Roles,E1,E2\nA,4,x\n").unwrap_err();
        assert!(matches!(err, CviError::Parse { line: 2, .. }));
        let err = RatingMatrix::from_csv("Roles,E1,E2\nA,4,7\n").unwrap_err();
        assert!(matches!(err, CviError::MalformedRating { value: 7, .. }));
        assert_eq!(RatingMatrix::from_csv("Roles\nA\n").unwrap_err(), CviError::InvalidPanel);
        assert_eq!(RatingMatrix::from_csv("Roles,E1\n").unwrap_err(), CviError::NoItems);
    }

    #[test]
    fn text_report_lists_every_item() {
        let m = RatingMatrix::from_csv("Roles,E1,E2,E3\nGood,4,4,3\nPoor,1,2,4\n").unwrap();
        let text = compute_scale_cvi(&m, 0.778).unwrap().to_text();
        assert!(text.contains("Good"));
        assert!(text.contains("1.000  VALID"));
        assert!(text.contains("0.333  INVALID"));
    }
}
