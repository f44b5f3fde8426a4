//! Verdict aggregation and corpus evaluation.
//!
//! A package's maliciousness score `S` is the maximum malware score over
//! its scored slices; the package is flagged when `S ≥ τ`.  On top of the
//! per-package verdicts this module computes classification metrics with a
//! threshold sweep, Sensitive Feature Recall (how many catalog-matching
//! lines of the original package survive into the slices), and context-size
//! statistics that show how much smaller slices are than raw packages.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write as _;
use std::process::{Command, Stdio};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::ApiCatalog;
use crate::ingest::{Label, SourceFileSet};
use crate::scoring::ScoreRecord;
use crate::slicer::{approx_tokens, Slice};

/// Decision threshold the pipeline defaults to.
pub const DEFAULT_TAU: f64 = 0.8;

/// Package-level classification outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Malicious,
    Benign,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Malicious => "malicious",
            Verdict::Benign => "benign",
        }
    }
}

/// Aggregated result for one package.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackageVerdict {
    pub package: String,
    /// Maximum malware score over scored slices; 0 when none were scored.
    #[serde(rename = "S")]
    pub s: f64,
    pub tau: f64,
    pub label: Verdict,
    pub n_slices: usize,
    pub n_unscored: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub top_slice_ref: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub annotations: Vec<String>,
}

/// Fold one package's score records into a verdict: `S` is the maximum
/// malware score among scored slices and the package is malicious iff
/// `S ≥ tau`.  With no scored slices, `S` is 0, the verdict benign, and
/// the outcome annotated `no_scored_slices`.
pub fn aggregate(package: &str, records: &[ScoreRecord], tau: f64) -> PackageVerdict {
    assert!((0.0..=1.0).contains(&tau), "tau must be within [0, 1]");
    let mut s = 0.0f64;
    let mut top: Option<String> = None;
    let mut n_unscored = 0usize;
    for r in records {
        match &r.scores {
            Some(scores) => {
                if top.is_none() || scores.malware > s {
                    s = scores.malware;
                    top = Some(r.slice_ref.clone());
                }
            }
            None => n_unscored += 1,
        }
    }
    let mut annotations = Vec::new();
    if top.is_none() {
        annotations.push("no_scored_slices".to_string());
    }
    let label = if top.is_some() && s >= tau { Verdict::Malicious } else { Verdict::Benign };
    PackageVerdict {
        package: package.to_string(),
        s,
        tau,
        label,
        n_slices: records.len(),
        n_unscored,
        top_slice_ref: top,
        annotations,
    }
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("package {0:?} has no ground-truth label")]
    MissingLabel(String),
    #[error("external tokenizer failed: {0}")]
    ExternalTokenizerFailed(String),
}

/// One operating point of the threshold sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub threshold: f64,
    /// FP / (FP + TN); null when the corpus has no negatives.
    pub fpr: Option<f64>,
    /// TP / (TP + FN); null when the corpus has no positives.
    pub tpr: Option<f64>,
}

/// Confusion counts and derived rates over a labeled corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    #[serde(rename = "TP")]
    pub tp: u64,
    #[serde(rename = "TN")]
    pub tn: u64,
    #[serde(rename = "FP")]
    pub fp: u64,
    #[serde(rename = "FN")]
    pub fn_: u64,
    /// Derived rates are null (never 0) when their denominator is zero.
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub roc: Vec<RocPoint>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// The default sweep grid: 0.00 to 1.00 in steps of 0.05.
pub fn default_roc_grid() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 20.0).collect()
}

/// Evaluate the `≥ threshold` rule at every threshold over (score, truth)
/// pairs, where truth is "actually malicious".
pub fn roc_sweep(scored: &[(f64, bool)], thresholds: &[f64]) -> Vec<RocPoint> {
    let positives = scored.iter().filter(|(_, truth)| *truth).count() as u64;
    let negatives = scored.len() as u64 - positives;
    thresholds
        .iter()
        .map(|&t| {
            let tp = scored.iter().filter(|(s, truth)| *truth && *s >= t).count() as u64;
            let fp = scored.iter().filter(|(s, truth)| !*truth && *s >= t).count() as u64;
            RocPoint { threshold: t, fpr: ratio(fp, negatives), tpr: ratio(tp, positives) }
        })
        .collect()
}

/// Score the verdict list against ground truth.  Malicious is the positive
/// class.  Every verdict must have a benign/malware label; the ROC sweep
/// uses the default grid over the verdicts' `S` values.
pub fn compute_metrics(
    verdicts: &[PackageVerdict],
    labels: &BTreeMap<String, Label>,
) -> Result<MetricsReport, EvalError> {
    let mut tp = 0u64;
    let mut tn = 0u64;
    let mut fp = 0u64;
    let mut fn_ = 0u64;
    let mut scored: Vec<(f64, bool)> = Vec::new();
    for v in verdicts {
        let truth = match labels.get(&v.package) {
            Some(Label::Malware) => true,
            Some(Label::Benign) => false,
            _ => return Err(EvalError::MissingLabel(v.package.clone())),
        };
        let predicted = v.label == Verdict::Malicious;
        match (truth, predicted) {
            (true, true) => tp += 1,
            (true, false) => fn_ += 1,
            (false, true) => fp += 1,
            (false, false) => tn += 1,
        }
        scored.push((v.s, truth));
    }
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        _ => None,
    };
    Ok(MetricsReport {
        tp,
        tn,
        fp,
        fn_,
        accuracy: ratio(tp + tn, tp + tn + fp + fn_),
        precision,
        recall,
        f1,
        roc: roc_sweep(&scored, &default_roc_grid()),
    })
}

// ---------------------------------------------------------------------------
// Sensitive Feature Recall
// ---------------------------------------------------------------------------

/// SFR for one package and one slicing method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SfrRow {
    pub package: String,
    pub method: String,
    /// Catalog-matching (file, line) pairs in the original package.
    pub n_original: usize,
    /// How many of those the slices retained.
    pub n_retained: usize,
    /// 100·retained/original; null when the package has no feature lines.
    pub sfr_percent: Option<f64>,
}

/// Mean SFR over packages sharing a label and method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SfrMean {
    pub label: String,
    pub method: String,
    pub n_packages: usize,
    pub mean_percent: Option<f64>,
}

/// (file, line) pairs whose raw line text matches any catalog pattern.
pub fn feature_lines(files: &SourceFileSet, catalog: &ApiCatalog) -> BTreeSet<(String, u32)> {
    let mut out = BTreeSet::new();
    for f in &files.files {
        for (i, line) in f.text.lines().enumerate() {
            if catalog.text_has_any(line) {
                out.insert((f.rel_path.clone(), i as u32 + 1));
            }
        }
    }
    out
}

/// Set form of SFR: 100·|retained ∩ original|/|original|, null on an empty
/// original set.
pub fn sfr_from_sets(
    original: &BTreeSet<(String, u32)>,
    sliced: &BTreeSet<(String, u32)>,
) -> Option<f64> {
    if original.is_empty() {
        return None;
    }
    let retained = original.intersection(sliced).count();
    Some(100.0 * retained as f64 / original.len() as f64)
}

/// All (file, line) pairs covered by a set of slices.
pub fn slice_line_set(slices: &[Slice]) -> BTreeSet<(String, u32)> {
    let mut out = BTreeSet::new();
    for s in slices {
        for (file, lines) in &s.lines {
            for &l in lines {
                out.insert((file.clone(), l));
            }
        }
    }
    out
}

/// SFR row for one package: feature lines of the raw files vs the lines a
/// method's slices retained.
pub fn sfr(
    files: &SourceFileSet,
    slices: &[Slice],
    catalog: &ApiCatalog,
    method: &str,
) -> SfrRow {
    let original = feature_lines(files, catalog);
    let sliced = slice_line_set(slices);
    let retained = original.intersection(&sliced).count();
    SfrRow {
        package: files.package.id.clone(),
        method: method.to_string(),
        n_original: original.len(),
        n_retained: retained,
        sfr_percent: sfr_from_sets(&original, &sliced),
    }
}

/// Group SFR rows by (label, method) and average the defined percentages.
pub fn sfr_means(rows: &[SfrRow], labels: &BTreeMap<String, Label>) -> Vec<SfrMean> {
    let mut groups: BTreeMap<(String, String), Vec<f64>> = BTreeMap::new();
    let mut counts: BTreeMap<(String, String), usize> = BTreeMap::new();
    for r in rows {
        let label = labels
            .get(&r.package)
            .copied()
            .unwrap_or(Label::Unlabeled)
            .as_str()
            .to_string();
        let key = (label, r.method.clone());
        *counts.entry(key.clone()).or_default() += 1;
        if let Some(p) = r.sfr_percent {
            groups.entry(key).or_default().push(p);
        }
    }
    counts
        .into_iter()
        .map(|((label, method), n)| {
            let vals = groups.get(&(label.clone(), method.clone()));
            let mean = vals.and_then(|v| {
                (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
            });
            SfrMean { label, method, n_packages: n, mean_percent: mean }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Context-size statistics
// ---------------------------------------------------------------------------

/// Five-number summary plus mean, computed with nearest-rank quantiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatSummary {
    pub mean: f64,
    pub min: u64,
    pub q25: u64,
    pub median: u64,
    pub q75: u64,
    pub max: u64,
}

/// Context sizes for one method (per-slice for slicers, per-package for the
/// baseline).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextStats {
    pub method: String,
    pub n_items: usize,
    pub loc: Option<StatSummary>,
    pub tokens: Option<StatSummary>,
}

/// One measured item: line count and token count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextItem {
    pub loc: usize,
    pub tokens: usize,
}

fn nearest_rank(sorted: &[u64], q: u32) -> u64 {
    debug_assert!(!sorted.is_empty());
    let n = sorted.len() as f64;
    let rank = (q as f64 / 100.0 * n).ceil() as usize;
    sorted[rank.max(1) - 1]
}

fn summarize(values: impl Iterator<Item = u64>) -> Option<StatSummary> {
    let mut v: Vec<u64> = values.collect();
    if v.is_empty() {
        return None;
    }
    v.sort_unstable();
    Some(StatSummary {
        mean: v.iter().sum::<u64>() as f64 / v.len() as f64,
        min: v[0],
        q25: nearest_rank(&v, 25),
        median: nearest_rank(&v, 50),
        q75: nearest_rank(&v, 75),
        max: *v.last().unwrap(),
    })
}

/// Summarize context sizes for one method.
pub fn context_stats(method: &str, items: &[ContextItem]) -> ContextStats {
    ContextStats {
        method: method.to_string(),
        n_items: items.len(),
        loc: summarize(items.iter().map(|i| i.loc as u64)),
        tokens: summarize(items.iter().map(|i| i.tokens as u64)),
    }
}

// ---------------------------------------------------------------------------
// Token counting
// ---------------------------------------------------------------------------

/// How text is measured in tokens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum TokenMode {
    /// Identifier/number runs plus one token per other non-whitespace
    /// character; dependency-free and deterministic.
    Approx,
    /// Shell command that reads text on stdin and prints a token count —
    /// for plugging in a real subword tokenizer.
    External { command: String },
}

impl Default for TokenMode {
    fn default() -> Self {
        TokenMode::Approx
    }
}

/// Count tokens in `text` under the selected mode.
pub fn count_tokens(text: &str, mode: &TokenMode) -> Result<usize, EvalError> {
    match mode {
        TokenMode::Approx => Ok(approx_tokens(text).len()),
        TokenMode::External { command } => {
            let mut child = Command::new("sh")
                .arg("-c")
                .arg(command)
                .stdin(Stdio::piped())
                .stdout(Stdio::piped())
                .stderr(Stdio::piped())
                .spawn()
                .map_err(|e| EvalError::ExternalTokenizerFailed(e.to_string()))?;
            child
                .stdin
                .as_mut()
                .expect("stdin piped")
                .write_all(text.as_bytes())
                .map_err(|e| EvalError::ExternalTokenizerFailed(e.to_string()))?;
            let out = child
                .wait_with_output()
                .map_err(|e| EvalError::ExternalTokenizerFailed(e.to_string()))?;
            if !out.status.success() {
                return Err(EvalError::ExternalTokenizerFailed(format!(
                    "command exited with {}: {}",
                    out.status,
                    String::from_utf8_lossy(&out.stderr).trim()
                )));
            }
            let text = String::from_utf8_lossy(&out.stdout);
            text.trim().parse::<usize>().map_err(|_| {
                EvalError::ExternalTokenizerFailed(format!(
                    "tokenizer printed {:?}, expected an integer",
                    text.trim()
                ))
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scoring::Scores;

    fn record(slice_ref: &str, malware: Option<f64>) -> ScoreRecord {
        ScoreRecord {
            slice_ref: slice_ref.to_string(),
            scorer_id: "stub".to_string(),
            latency_ms: 0,
            scores: malware.map(|m| Scores {
                confidence: 0.9,
                obfuscated: 0.0,
                malware: m,
                security_risk: m,
            }),
            unscored: malware.is_none().then(|| "reason".to_string()),
        }
    }

    #[test]
    fn aggregate_takes_the_max() {
        let records = vec![
            record("p/static/0", Some(0.2)),
            record("p/static/1", Some(0.9)),
            record("p/static/2", Some(0.5)),
        ];
        let v = aggregate("p", &records, 0.8);
        assert_eq!(v.s, 0.9);
        assert_eq!(v.label, Verdict::Malicious);
        assert_eq!(v.top_slice_ref.as_deref(), Some("p/static/1"));
        assert_eq!(v.n_slices, 3);
        assert_eq!(v.n_unscored, 0);
    }

    #[test]
    fn aggregate_equality_is_malicious() {
        let v = aggregate("p", &[record("p/static/0", Some(0.8))], 0.8);
        assert_eq!(v.label, Verdict::Malicious);
        let v = aggregate("p", &[record("p/static/0", Some(0.7999))], 0.8);
        assert_eq!(v.label, Verdict::Benign);
    }

    #[test]
    fn aggregate_empty_is_annotated_benign() {
        let v = aggregate("p", &[], 0.8);
        assert_eq!(v.s, 0.0);
        assert_eq!(v.label, Verdict::Benign);
        assert!(v.annotations.contains(&"no_scored_slices".to_string()));
        let v = aggregate("p", &[record("p/static/0", None)], 0.0);
        assert_eq!(v.label, Verdict::Benign, "unscored slices never flag a package");
        assert_eq!(v.n_unscored, 1);
    }

    #[test]
    fn aggregate_is_permutation_invariant() {
        let mut records = vec![
            record("p/static/0", Some(0.3)),
            record("p/static/1", Some(0.95)),
            record("p/static/2", None),
            record("p/static/3", Some(0.7)),
        ];
        let a = aggregate("p", &records, 0.8);
        records.reverse();
        let b = aggregate("p", &records, 0.8);
        assert_eq!(a.s, b.s);
        assert_eq!(a.label, b.label);
        assert_eq!(a.n_unscored, b.n_unscored);
        // The top slice is the max-malware slice regardless of order.
        assert_eq!(a.top_slice_ref, b.top_slice_ref);
    }

    fn verdict(pkg: &str, s: f64, tau: f64) -> PackageVerdict {
        aggregate(pkg, &[record(&format!("{pkg}/static/0"), Some(s))], tau)
    }

    #[test]
    fn metrics_worked_example() {
        // TP=2, FP=1, FN=0, TN=1.
        let verdicts = vec![
            verdict("m1", 0.9, 0.8),
            verdict("m2", 0.85, 0.8),
            verdict("b1", 0.9, 0.8),
            verdict("b2", 0.1, 0.8),
        ];
        let labels: BTreeMap<String, Label> = [
            ("m1".to_string(), Label::Malware),
            ("m2".to_string(), Label::Malware),
            ("b1".to_string(), Label::Benign),
            ("b2".to_string(), Label::Benign),
        ]
        .into_iter()
        .collect();
        let m = compute_metrics(&verdicts, &labels).unwrap();
        assert_eq!((m.tp, m.fp, m.fn_, m.tn), (2, 1, 0, 1));
        assert!((m.precision.unwrap() - 2.0 / 3.0).abs() < 1e-9);
        assert_eq!(m.recall.unwrap(), 1.0);
        assert!((m.f1.unwrap() - 0.8).abs() < 1e-9);
        assert_eq!(m.accuracy.unwrap(), 0.75);
    }

    #[test]
    fn metrics_divide_by_zero_is_null() {
        let verdicts = vec![verdict("b1", 0.1, 0.8), verdict("b2", 0.2, 0.8)];
        let labels: BTreeMap<String, Label> = [
            ("b1".to_string(), Label::Benign),
            ("b2".to_string(), Label::Benign),
        ]
        .into_iter()
        .collect();
        let m = compute_metrics(&verdicts, &labels).unwrap();
        assert_eq!(m.precision, None);
        assert_eq!(m.recall, None);
        assert_eq!(m.f1, None);
        assert_eq!(m.accuracy, Some(1.0));
    }

    #[test]
    fn metrics_require_labels() {
        let verdicts = vec![verdict("x", 0.5, 0.8)];
        let labels = BTreeMap::new();
        assert!(matches!(
            compute_metrics(&verdicts, &labels),
            Err(EvalError::MissingLabel(p)) if p == "x"
        ));
    }

    #[test]
    fn roc_boundaries() {
        let scored = vec![(0.9, true), (0.1, false)];
        let pts = roc_sweep(&scored, &[0.0, 0.5, 1.01]);
        assert_eq!(pts[0].tpr, Some(1.0));
        assert_eq!(pts[0].fpr, Some(1.0));
        assert_eq!(pts[1].tpr, Some(1.0));
        assert_eq!(pts[1].fpr, Some(0.0));
        assert_eq!(pts[2].tpr, Some(0.0));
        assert_eq!(pts[2].fpr, Some(0.0));
    }

    #[test]
    fn roc_is_monotone_on_default_grid() {
        let scored: Vec<(f64, bool)> = (0..40)
            .map(|i| (i as f64 / 40.0, i % 3 == 0))
            .collect();
        let pts = roc_sweep(&scored, &default_roc_grid());
        for w in pts.windows(2) {
            assert!(w[1].tpr.unwrap() <= w[0].tpr.unwrap());
            assert!(w[1].fpr.unwrap() <= w[0].fpr.unwrap());
        }
    }

    #[test]
    fn sfr_set_arithmetic() {
        let original: BTreeSet<(String, u32)> = [
            ("a.js".to_string(), 1),
            ("a.js".to_string(), 5),
            ("b.js".to_string(), 2),
        ]
        .into_iter()
        .collect();
        assert_eq!(sfr_from_sets(&original, &original), Some(100.0));
        let partial: BTreeSet<(String, u32)> = [
            ("a.js".to_string(), 1),
            ("b.js".to_string(), 2),
            ("b.js".to_string(), 99),
        ]
        .into_iter()
        .collect();
        let got = sfr_from_sets(&original, &partial).unwrap();
        assert!((got - 200.0 / 3.0).abs() < 1e-9);
        assert_eq!(sfr_from_sets(&BTreeSet::new(), &partial), None);
    }

    #[test]
    fn context_stats_quantiles() {
        let items: Vec<ContextItem> =
            (1..=5).map(|i| ContextItem { loc: i, tokens: i * 10 }).collect();
        let s = context_stats("static", &items);
        let loc = s.loc.unwrap();
        assert_eq!(loc.q25, 2);
        assert_eq!(loc.median, 3);
        assert_eq!(loc.q75, 4);
        assert_eq!(loc.min, 1);
        assert_eq!(loc.max, 5);
        assert_eq!(loc.mean, 3.0);
        let one = context_stats("static", &[ContextItem { loc: 7, tokens: 9 }]);
        let loc = one.loc.unwrap();
        assert_eq!((loc.min, loc.q25, loc.median, loc.q75, loc.max), (7, 7, 7, 7, 7));
        let empty = context_stats("static", &[]);
        assert!(empty.loc.is_none() && empty.tokens.is_none());
    }

    #[test]
    fn context_stats_ordering_invariant() {
        let items: Vec<ContextItem> = [9usize, 2, 14, 3, 3, 77, 1]
            .iter()
            .map(|&l| ContextItem { loc: l, tokens: l * 3 + 1 })
            .collect();
        let s = context_stats("taint", &items);
        for summary in [s.loc.unwrap(), s.tokens.unwrap()] {
            assert!(summary.min <= summary.q25);
            assert!(summary.q25 <= summary.median);
            assert!(summary.median <= summary.q75);
            assert!(summary.q75 <= summary.max);
        }
    }

    #[test]
    fn token_counting_approx() {
        assert_eq!(count_tokens("a + bb", &TokenMode::Approx).unwrap(), 3);
        assert_eq!(count_tokens("exec(x)", &TokenMode::Approx).unwrap(), 4);
        assert_eq!(count_tokens("", &TokenMode::Approx).unwrap(), 0);
    }

    #[test]
    fn token_counting_external() {
        let mode = TokenMode::External { command: "wc -c".to_string() };
        assert_eq!(count_tokens("abc", &mode).unwrap(), 3);
        let bad = TokenMode::External { command: "echo not-a-number".to_string() };
        assert!(matches!(
            count_tokens("abc", &bad),
            Err(EvalError::ExternalTokenizerFailed(_))
        ));
        let failing = TokenMode::External { command: "exit 3".to_string() };
        assert!(count_tokens("abc", &failing).is_err());
    }
}
