//! CSV and markdown renderings of the study results.

use std::fmt::Write as _;
use std::path::Path;

use super::{AblationReport, EvaluationReport, ImportanceRow, MethodSummary};
use crate::error::{Error, Result};
use crate::util::fmt_f64;

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::io("<csv>", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn folds_csv(report: &EvaluationReport) -> Result<String> {
    let rows = report.methods.iter().flat_map(|m| {
        m.folds.iter().enumerate().map(move |(f, o)| {
            vec![m.name.clone(), f.to_string(), fmt_f64(o.ndcg), fmt_f64(o.top1), fmt_f64(o.top3)]
        })
    });
    csv_text(&["method", "fold", "ndcg_at_10", "top1_pct", "top3_pct"], rows)
}

pub fn summary_csv(report: &EvaluationReport) -> Result<String> {
    let rows = report.methods.iter().map(summary_record);
    csv_text(
        &[
            "method",
            "mean_ndcg_at_10",
            "ci95_ndcg",
            "mean_top1_pct",
            "ci95_top1",
            "mean_top3_pct",
            "ci95_top3",
            "gap_closed_pct",
        ],
        rows,
    )
}

fn summary_record(m: &MethodSummary) -> Vec<String> {
    vec![
        m.name.clone(),
        fmt_f64(m.mean_ndcg),
        opt(m.ci_ndcg),
        fmt_f64(m.mean_top1),
        opt(m.ci_top1),
        fmt_f64(m.mean_top3),
        opt(m.ci_top3),
        opt(m.gap_closed),
    ]
}

fn pm(mean: f64, ci: Option<f64>, decimals: usize) -> String {
    match ci {
        Some(c) => format!("{mean:.decimals$} ± {c:.decimals$}"),
        None => format!("{mean:.decimals$}"),
    }
}

pub fn evaluation_markdown(report: &EvaluationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# Selection results\n\n{} users, {} algorithms ({}), {}-fold nested cross-validation, seed {}.\n",
        report.n_users,
        report.algorithms.len(),
        report.algorithms.join(", "),
        report.k,
        report.seed
    );
    let _ = writeln!(s, "## Performance (mean NDCG@10 ± 95% CI half-width)\n");
    let _ = writeln!(s, "| Method | NDCG@10 | Gap closed |\n|---|---|---|");
    for m in &report.methods {
        let gap = m.gap_closed.map_or("n/a".to_string(), |g| format!("{g:.1}%"));
        let _ = writeln!(s, "| {} | {} | {} |", m.name, pm(m.mean_ndcg, m.ci_ndcg, 4), gap);
    }
    let _ = writeln!(s, "\n## Selection accuracy (%)\n");
    let _ = writeln!(s, "| Method | Top-1 | Top-3 |\n|---|---|---|");
    for m in &report.methods {
        let _ = writeln!(
            s,
            "| {} | {} | {} |",
            m.name,
            pm(m.mean_top1, m.ci_top1, 1),
            pm(m.mean_top3, m.ci_top3, 1)
        );
    }
    s
}

/// Writes `folds.csv`, `summary.csv` and `report.md` into `dir`.
pub fn write_evaluation(report: &EvaluationReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_file(&dir.join("folds.csv"), &folds_csv(report)?)?;
    write_file(&dir.join("summary.csv"), &summary_csv(report)?)?;
    write_file(&dir.join("report.md"), &evaluation_markdown(report))
}

pub fn ablation_csv(report: &AblationReport) -> Result<String> {
    let rows = report.rows.iter().map(|r| {
        let groups: Vec<&str> = r.groups.iter().map(|g| g.prefix()).collect();
        let mut rec = vec![r.name.clone(), groups.join("+"), r.algorithm_columns.to_string()];
        rec.extend(summary_record(&r.summary).into_iter().skip(1));
        rec
    });
    csv_text(
        &[
            "arm",
            "groups",
            "algorithm_columns",
            "mean_ndcg_at_10",
            "ci95_ndcg",
            "mean_top1_pct",
            "ci95_top1",
            "mean_top3_pct",
            "ci95_top3",
            "gap_closed_pct",
        ],
        rows,
    )
}

pub fn ablation_markdown(report: &AblationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# Algorithm-feature ablation\n\n{}-fold nested cross-validation. SBA {:.4}, VBA {:.4}.\n",
        report.k, report.sba_ndcg, report.vba_ndcg
    );
    let _ = writeln!(s, "| Arm | Columns | NDCG@10 | Top-1 (%) | Top-3 (%) |\n|---|---|---|---|---|");
    for r in &report.rows {
        let m = &r.summary;
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} |",
            r.name,
            r.algorithm_columns,
            pm(m.mean_ndcg, m.ci_ndcg, 4),
            pm(m.mean_top1, m.ci_top1, 1),
            pm(m.mean_top3, m.ci_top3, 1)
        );
    }
    s
}

pub fn write_ablation(report: &AblationReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_file(&dir.join("ablation.csv"), &ablation_csv(report)?)?;
    write_file(&dir.join("ablation.md"), &ablation_markdown(report))
}

pub fn importance_csv(rows: &[ImportanceRow]) -> Result<String> {
    csv_text(
        &["feature", "mean", "std"],
        rows.iter().map(|r| vec![r.feature.clone(), fmt_f64(r.mean), fmt_f64(r.std)]),
    )
}

pub fn importance_markdown(rows: &[ImportanceRow], top: usize) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# Top {top} features by importance\n");
    let _ = writeln!(s, "| Rank | Feature | Mean | Std |\n|---|---|---|---|");
    for (i, r) in rows.iter().take(top).enumerate() {
        let _ = writeln!(s, "| {} | {} | {:.4} | {:.4} |", i + 1, r.feature, r.mean, r.std);
    }
    s
}

pub fn write_importance(rows: &[ImportanceRow], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_file(&dir.join("importance.csv"), &importance_csv(rows)?)?;
    write_file(&dir.join("importance_top20.md"), &importance_markdown(rows, 20))
}
