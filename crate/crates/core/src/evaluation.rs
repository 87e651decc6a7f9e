//! Residue-wise scoring of linker calls against reference linkers.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::demarcation::LinkerCall;
use crate::error::{Error, Result};

/// Inclusive residue interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueRange {
    pub start: i32,
    pub end: i32,
}

impl ResidueRange {
    pub fn new(start: i32, end: i32) -> Self {
        debug_assert!(start <= end);
        ResidueRange { start, end }
    }

    pub fn len(&self) -> usize {
        (self.end - self.start + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn intersection_len(&self, other: &ResidueRange) -> usize {
        let lo = self.start.max(other.start);
        let hi = self.end.min(other.end);
        if hi >= lo {
            (hi - lo + 1) as usize
        } else {
            0
        }
    }

    pub fn contains(&self, point: i32) -> bool {
        self.start <= point && point <= self.end
    }

    /// Counts with `self` as the prediction and `gold` as the reference.
    pub fn confusion(&self, gold: &ResidueRange) -> ConfusionCounts {
        let tp = self.intersection_len(gold);
        ConfusionCounts {
            tp,
            fp: self.len() - tp,
            fn_: gold.len() - tp,
        }
    }
}

impl fmt::Display for ResidueRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start, self.end)
    }
}

impl std::str::FromStr for ResidueRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("expected <start>-<end>, got {s:?}"));
        let (a, b) = s.trim().split_once('-').ok_or_else(bad)?;
        let (start, end): (i32, i32) = (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        );
        if start > end {
            return Err(bad());
        }
        Ok(ResidueRange { start, end })
    }
}

/// A residue range on a specific chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainSpan {
    pub structure_id: String,
    pub chain_id: char,
    pub range: ResidueRange,
}

impl ChainSpan {
    fn same_chain(&self, other: &ChainSpan) -> Result<()> {
        if self.structure_id != other.structure_id || self.chain_id != other.chain_id {
            return Err(Error::ChainMismatch {
                left: format!("{}:{}", self.structure_id, self.chain_id),
                right: format!("{}:{}", other.structure_id, other.chain_id),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldLinker {
    pub structure_id: String,
    pub chain_id: char,
    pub range: ResidueRange,
    pub citation: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl std::ops::Add for ConfusionCounts {
    type Output = ConfusionCounts;

    fn add(self, o: ConfusionCounts) -> ConfusionCounts {
        ConfusionCounts {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
        }
    }
}

impl std::iter::Sum for ConfusionCounts {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(ConfusionCounts::default(), |a, b| a + b)
    }
}

pub fn residue_confusion(pred: &ChainSpan, gold: &ChainSpan) -> Result<ConfusionCounts> {
    pred.same_chain(gold)?;
    Ok(pred.range.confusion(&gold.range))
}

/// Precision, recall and F1; `None` where a denominator vanishes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

pub fn f1_score(precision: f64, recall: f64) -> Option<f64> {
    let sum = precision + recall;
    (sum > 0.0).then(|| 2.0 * precision * recall / sum)
}

pub fn prf(c: &ConfusionCounts) -> Prf {
    let ratio = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = ratio(c.tp, c.tp + c.fn_);
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) => f1_score(p, r),
        _ => None,
    };
    Prf {
        precision,
        recall,
        f1,
    }
}

/// Whether a predicted domain cut point falls inside the reference linker.
pub fn cutpoint_hit(point: i32, gold: &ResidueRange) -> bool {
    gold.contains(point)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgreementBand {
    Reasonable,
    Medium,
    Weak,
    Disagree,
}

impl fmt::Display for AgreementBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AgreementBand::Reasonable => "reasonable",
            AgreementBand::Medium => "medium",
            AgreementBand::Weak => "weak",
            AgreementBand::Disagree => "disagree",
        })
    }
}

/// Jaccard overlap of two residue ranges and its agreement band:
/// `> 0.75` reasonable, `(0.40, 0.75]` medium, `(0, 0.40]` weak, `0` disagree.
pub fn overlap_agreement(a: &ResidueRange, b: &ResidueRange) -> (f64, AgreementBand) {
    let inter = a.intersection_len(b);
    let union = a.len() + b.len() - inter;
    let fraction = inter as f64 / union as f64;
    let band = if fraction > 0.75 {
        AgreementBand::Reasonable
    } else if fraction > 0.40 {
        AgreementBand::Medium
    } else if fraction > 0.0 {
        AgreementBand::Weak
    } else {
        AgreementBand::Disagree
    };
    (fraction, band)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    #[default]
    Micro,
    Macro,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum RowOutcome {
    Scored {
        boundary: i32,
        predicted: ResidueRange,
        counts: ConfusionCounts,
        agreement: f64,
        band: AgreementBand,
    },
    NoLinker {
        boundary: i32,
    },
    Unmatched,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub structure_id: String,
    pub chain_id: char,
    pub gold: ResidueRange,
    #[serde(flatten)]
    pub outcome: RowOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub rows: Vec<EvalRow>,
    /// Pooled counts: scored rows plus the full length of unmatched gold
    /// linkers as false negatives.
    pub totals: ConfusionCounts,
    pub micro: Prf,
    pub macro_avg: Prf,
    pub no_linker: usize,
    pub unmatched: usize,
    /// Predictions not joined to any gold linker.
    pub unused_predictions: usize,
}

impl EvaluationReport {
    pub fn aggregate(&self, mode: Aggregation) -> Prf {
        match mode {
            Aggregation::Micro => self.micro,
            Aggregation::Macro => self.macro_avg,
        }
    }
}

fn mean_defined(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let (sum, n) = values
        .flatten()
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Join each gold linker to the call on the same chain whose boundary is
/// nearest the gold midpoint (smaller boundary on ties) and score it.
///
/// `no_linker` calls are counted but excluded from the confusion totals;
/// gold linkers with no call on their chain count fully as false negatives.
pub fn evaluate_run(preds: &[LinkerCall], golds: &[GoldLinker]) -> Result<EvaluationReport> {
    let mut by_chain: BTreeMap<(&str, char), Vec<&LinkerCall>> = BTreeMap::new();
    for p in preds {
        by_chain
            .entry((p.structure_id.as_str(), p.chain_id))
            .or_default()
            .push(p);
    }

    let mut used: HashSet<(String, char, i32)> = HashSet::new();
    let mut rows = Vec::with_capacity(golds.len());
    for g in golds {
        let mid = (g.range.start + g.range.end) as f64 / 2.0;
        let nearest = by_chain
            .get(&(g.structure_id.as_str(), g.chain_id))
            .and_then(|calls| {
                calls.iter().copied().min_by(|a, b| {
                    (a.boundary as f64 - mid)
                        .abs()
                        .total_cmp(&(b.boundary as f64 - mid).abs())
                        .then(a.boundary.cmp(&b.boundary))
                })
            });
        let outcome = match nearest {
            None => RowOutcome::Unmatched,
            Some(call) => {
                if !used.insert((call.structure_id.clone(), call.chain_id, call.boundary)) {
                    return Err(Error::DuplicateGold {
                        structure_id: g.structure_id.clone(),
                        chain_id: g.chain_id,
                        boundary: call.boundary,
                    });
                }
                match call.range() {
                    None => RowOutcome::NoLinker {
                        boundary: call.boundary,
                    },
                    Some((s, e)) => {
                        let predicted = ResidueRange::new(s, e);
                        let (agreement, band) = overlap_agreement(&predicted, &g.range);
                        RowOutcome::Scored {
                            boundary: call.boundary,
                            predicted,
                            counts: predicted.confusion(&g.range),
                            agreement,
                            band,
                        }
                    }
                }
            }
        };
        rows.push(EvalRow {
            structure_id: g.structure_id.clone(),
            chain_id: g.chain_id,
            gold: g.range,
            outcome,
        });
    }

    let totals: ConfusionCounts = rows
        .iter()
        .map(|r| match &r.outcome {
            RowOutcome::Scored { counts, .. } => *counts,
            RowOutcome::Unmatched => ConfusionCounts {
                tp: 0,
                fp: 0,
                fn_: r.gold.len(),
            },
            RowOutcome::NoLinker { .. } => ConfusionCounts::default(),
        })
        .sum();
    let per_row: Vec<Prf> = rows
        .iter()
        .filter_map(|r| match &r.outcome {
            RowOutcome::Scored { counts, .. } => Some(prf(counts)),
            _ => None,
        })
        .collect();
    let macro_avg = Prf {
        precision: mean_defined(per_row.iter().map(|p| p.precision)),
        recall: mean_defined(per_row.iter().map(|p| p.recall)),
        f1: mean_defined(per_row.iter().map(|p| p.f1)),
    };
    let no_linker = rows
        .iter()
        .filter(|r| matches!(r.outcome, RowOutcome::NoLinker { .. }))
        .count();
    let unmatched = rows
        .iter()
        .filter(|r| matches!(r.outcome, RowOutcome::Unmatched))
        .count();

    Ok(EvaluationReport {
        micro: prf(&totals),
        totals,
        macro_avg,
        no_linker,
        unmatched,
        unused_predictions: preds.len() - used.len(),
        rows,
    })
}

/// Parse a gold table: `structure_id  chain_id  start  end  citation`.
/// Tab-separated; the citation column is optional and may contain spaces.
pub fn parse_gold(text: &str) -> Result<Vec<GoldLinker>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let row = idx + 1;
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let err = |message: String| Error::DomainTable { row, message };
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() < 4 {
            return Err(err(format!("expected at least 4 fields, found {}", fields.len())));
        }
        let mut chars = fields[1].chars();
        let chain_id = match (chars.next(), chars.next()) {
            (Some(c), None) => c,
            _ => return Err(err(format!("bad chain id {:?}", fields[1]))),
        };
        let num = |s: &str| {
            s.parse::<i32>()
                .map_err(|_| err(format!("non-integer residue {s:?}")))
        };
        let (start, end) = (num(fields[2])?, num(fields[3])?);
        if start > end {
            return Err(err(format!("start {start} after end {end}")));
        }
        out.push(GoldLinker {
            structure_id: fields[0].to_string(),
            chain_id,
            range: ResidueRange { start, end },
            citation: fields.get(4).copied().unwrap_or("").to_string(),
        });
    }
    Ok(out)
}

/// Linker length -> number of calls, over calls that demarcate a linker.
pub fn length_histogram(calls: &[LinkerCall]) -> BTreeMap<usize, usize> {
    let mut hist = BTreeMap::new();
    for (s, e) in calls.iter().filter_map(LinkerCall::range) {
        *hist.entry((e - s + 1) as usize).or_insert(0) += 1;
    }
    hist
}

pub fn histogram_mean(hist: &BTreeMap<usize, usize>) -> Option<f64> {
    let n: usize = hist.values().sum();
    (n > 0).then(|| hist.iter().map(|(l, c)| l * c).sum::<usize>() as f64 / n as f64)
}
